"""Sequential filters: frozen examples, equivalences, and stress cases."""

import numpy as np
import pytest
from scipy.special import gammaln, logsumexp

from hbni.core import clamp_simplex
from hbni.filters import (
    METHODS,
    ClassPosterior,
    HBNIFilter,
    MaxOfMeanFilter,
    StaticStateBayesFilter,
    VotingFilter,
    batch,
    make_filter,
    max_of_mean,
    vote,
)
from hbni.genmodel import sample_observations
from hbni.rng import child_rng, root_rng


def random_history(rng, n, m):
    return rng.dirichlet(np.ones(m), size=n)


class TestMaxOfMean:
    def test_arithmetic_mean(self):
        post = max_of_mean([[0.8, 0.2], [0.6, 0.4]])
        np.testing.assert_allclose(post.probs, [0.7, 0.3])

    def test_single_observation_identity(self):
        post = max_of_mean([[0.15, 0.85]])
        np.testing.assert_allclose(post.probs, [0.15, 0.85])

    def test_order_invariance(self):
        rng = root_rng(1)
        hist = random_history(rng, 20, 3)
        shuffled = hist[rng.permutation(20)]
        np.testing.assert_allclose(
            max_of_mean(hist).probs, max_of_mean(shuffled).probs, atol=1e-12
        )

    def test_empty_history_rejected(self):
        with pytest.raises(ValueError):
            max_of_mean(np.empty((0, 2)))


class TestVoting:
    def test_vote_counts(self):
        label, counts = vote([[0.8, 0.2], [0.4, 0.6], [0.9, 0.1]])
        assert label == 1
        np.testing.assert_array_equal(counts, [2, 1])

    def test_tie_breaks_to_lowest_index(self):
        label, counts = vote([[0.8, 0.2], [0.2, 0.8]])
        assert label == 1
        np.testing.assert_array_equal(counts, [1, 1])

    def test_unanimous(self):
        rng = root_rng(2)
        hist = sample_observations(2, np.array([0.0, 50.0, 0.0]), 30, rng)
        label, counts = vote(hist)
        assert label == 2
        assert counts[1] == 30


class TestSSBF:
    def test_first_observation_cancels_uniform_prior(self):
        f = StaticStateBayesFilter().reset(2)
        f.update([0.8, 0.2])
        np.testing.assert_allclose(f.predict_proba(), [0.8, 0.2], atol=1e-12)

    def test_two_identical_observations(self):
        f = StaticStateBayesFilter().reset(2)
        f.partial_fit([[0.8, 0.2], [0.8, 0.2]])
        np.testing.assert_allclose(f.predict_proba(), [0.64 / 0.68, 0.04 / 0.68], atol=1e-9)

    def test_uniform_observation_is_neutral(self):
        f = StaticStateBayesFilter().reset(3)
        f.partial_fit([[0.7, 0.2, 0.1]])
        before = f.predict_proba()
        f.update([1 / 3, 1 / 3, 1 / 3])
        np.testing.assert_allclose(f.predict_proba(), before, atol=1e-12)

    def test_zero_prior_component_rejected(self):
        with pytest.raises(ValueError):
            StaticStateBayesFilter(prior=[1.0, 0.0]).reset(2)

    def test_nonuniform_prior_division(self):
        # One update: posterior proportional to o_m, the prior cancels.
        f = StaticStateBayesFilter(prior=[0.9, 0.1]).reset(2)
        f.update([0.5, 0.5])
        np.testing.assert_allclose(f.predict_proba(), [0.5, 0.5], atol=1e-12)


class TestHBNIFilter:
    def test_equal_concentrations_match_ssbf_on_first_update(self):
        f = HBNIFilter(theta=[1.0, 1.0]).reset(2)
        f.update([0.8, 0.2])
        np.testing.assert_allclose(f.predict_proba(), [0.8, 0.2], atol=1e-12)

    def test_zero_concentration_carries_no_evidence(self):
        f = HBNIFilter(theta=[0.0, 0.0, 0.0], prior=[0.5, 0.3, 0.2]).reset(3)
        rng = root_rng(3)
        for row in random_history(rng, 25, 3):
            f.update(row)
        np.testing.assert_allclose(f.predict_proba(), [0.5, 0.3, 0.2], atol=1e-12)

    def test_noisy_class_stream_recovered(self):
        # Streams from the noisiest class, filtered with the true noise
        # levels: argmax must identify it in at least 95% of trials.
        theta = np.array([1.0, 6.0, 20.0])
        hits = 0
        trials = 2000
        for t in range(trials):
            rng = child_rng(404, 77, t)
            hist = sample_observations(1, theta, 10, rng)
            f = HBNIFilter(theta=theta).fit(hist)
            hits += f.predict() == 1
        assert hits / trials >= 0.95

    def test_requires_theta(self):
        with pytest.raises(ValueError):
            HBNIFilter().reset(2)

    def test_set_noise_keeps_accumulated_evidence(self):
        f = HBNIFilter(theta=[2.0, 2.0]).reset(2)
        f.update([0.9, 0.1])
        lik_before = f.log_lik_.copy()
        f.set_noise([5.0, 5.0])
        np.testing.assert_array_equal(f.log_lik_, lik_before)
        f.update([0.9, 0.1])
        assert f.n_observations_ == 2

    def test_marginal_mode_matches_direct_average(self):
        # Averaging the likelihood of the whole history over retained
        # draws, computed here from first principles.
        samples = np.array([[0.5, 3.0], [2.0, 1.0], [4.0, 8.0]])
        hist = np.array([[0.7, 0.3], [0.6, 0.4]])
        f = HBNIFilter(mode="marginal", theta_samples=samples).reset(2)
        f.partial_fit(hist)
        got = f.predict_proba()

        m = 2
        lo = np.log(np.vstack([clamp_simplex(r) for r in hist]))
        loglik = np.zeros((3, 2))
        for s in range(3):
            for cls in range(m):
                th = samples[s, cls]
                loglik[s, cls] = sum(
                    -gammaln(1 + th) + gammaln(m + th) + th * lo[i, cls] for i in range(2)
                )
        logits = np.log([0.5, 0.5]) + logsumexp(loglik, axis=0) - np.log(3)
        want = np.exp(logits - logsumexp(logits))
        np.testing.assert_allclose(got, want / want.sum(), atol=1e-12)

    def test_marginal_mode_requires_samples(self):
        with pytest.raises(ValueError):
            HBNIFilter(mode="marginal").reset(2)


class TestRecursiveBatchEquivalence:
    @pytest.mark.parametrize("method", ["ssbf", "hbni"])
    def test_trace_matches_recursion_in_log_space(self, method):
        rng = root_rng(5)
        for n in (1, 7, 50, 200):
            m = int(rng.integers(2, 5))
            hist = random_history(rng, n, m)
            theta = rng.uniform(0.0, 15.0, size=m)
            filt = make_filter(method, theta=theta if method == "hbni" else None)
            trace = filt.posterior_trace(hist)
            stream = make_filter(method, theta=theta if method == "hbni" else None).reset(m)
            for k in range(n):
                stream.update(hist[k])
                step = stream.predict_proba()
                np.testing.assert_allclose(
                    np.log(step), np.log(trace[k]), atol=1e-10
                )

    @pytest.mark.parametrize("method", METHODS)
    def test_batch_equals_fold(self, method):
        rng = root_rng(6)
        hist = random_history(rng, 40, 3)
        theta = np.array([1.0, 6.0, 20.0])
        want = make_filter(method, theta=theta).fit(hist).predict_proba()
        got = batch(method, hist, theta=theta)
        np.testing.assert_array_equal(got.probs, want)
        assert got.n_observations == 40

    def test_batch_empty_history_returns_prior(self):
        got = batch("ssbf", np.empty((0, 3)), prior=[0.2, 0.3, 0.5])
        np.testing.assert_allclose(got.probs, [0.2, 0.3, 0.5])
        assert got.n_observations == 0

    def test_marginal_trace_matches_recursion(self):
        rng = root_rng(7)
        hist = random_history(rng, 30, 3)
        samples = rng.uniform(0.1, 20.0, size=(25, 3))
        filt = HBNIFilter(mode="marginal", theta_samples=samples)
        trace = filt.posterior_trace(hist)
        stream = HBNIFilter(mode="marginal", theta_samples=samples).reset(3)
        for k in range(30):
            stream.update(hist[k])
            np.testing.assert_allclose(
                np.log(stream.predict_proba()), np.log(trace[k]), atol=1e-10
            )


class TestCrossMethodProperties:
    def test_single_observation_argmax_coincidence(self):
        # With a uniform prior, voting, max-of-mean and the Bayes filter
        # all reduce to argmax of the lone observation.
        rng = root_rng(8)
        for _ in range(200):
            m = int(rng.integers(2, 6))
            o = rng.dirichlet(np.ones(m))
            picks = {
                name: make_filter(name).fit(o.reshape(1, m)).predict()
                for name in ("voting", "max_of_mean", "ssbf")
            }
            assert len(set(picks.values())) == 1

    def test_equal_theta_hbni_has_ssbf_argmax(self):
        rng = root_rng(9)
        for _ in range(100):
            m = int(rng.integers(2, 5))
            n = int(rng.integers(1, 60))
            hist = random_history(rng, n, m)
            theta = float(rng.uniform(0.2, 10.0))
            a = HBNIFilter(theta=np.full(m, theta)).fit(hist).predict()
            b = StaticStateBayesFilter().fit(hist).predict()
            assert a == b

    def test_posteriors_remain_simplex_after_every_update(self):
        rng = root_rng(10)
        hist = random_history(rng, 50, 4)
        theta = rng.uniform(0.0, 25.0, size=4)
        for method in METHODS:
            f = make_filter(method, theta=theta).reset(4)
            for row in hist:
                f.update(row)
                p = f.predict_proba()
                assert np.all(p >= 0)
                assert abs(p.sum() - 1.0) < 1e-9

    def test_no_underflow_on_adversarial_streams(self):
        # 10k near-one-hot rows pointing at class 2: log-space state must
        # keep the posterior normalizable with a confident argmax.
        n = 10_000
        hist = np.tile([1e-12, 1.0 - 2e-12, 1e-12], (n, 1))
        for method in ("ssbf", "hbni"):
            f = make_filter(method, theta=np.array([5.0, 5.0, 5.0])).reset(3)
            for row in hist:
                f.update(row)
            p = f.predict_proba()
            assert np.isfinite(p).all()
            assert p.sum() == pytest.approx(1.0, abs=1e-9)
            assert p[1] > 0.99


class TestStreamingApi:
    def test_fit_resets_state(self):
        f = MaxOfMeanFilter().fit([[0.9, 0.1]])
        f.fit([[0.2, 0.8]])
        np.testing.assert_allclose(f.predict_proba(), [0.2, 0.8])
        assert f.n_observations_ == 1

    def test_dimension_mismatch_rejected(self):
        f = VotingFilter().reset(3)
        with pytest.raises(ValueError):
            f.update([0.5, 0.5])

    def test_posterior_trace_leaves_stream_state_alone(self):
        f = StaticStateBayesFilter().reset(2)
        f.update([0.9, 0.1])
        before = f.predict_proba().copy()
        f.posterior_trace(np.array([[0.1, 0.9]] * 5))
        np.testing.assert_array_equal(f.predict_proba(), before)

    def test_predict_proba_without_state_raises(self):
        from sklearn.exceptions import NotFittedError

        with pytest.raises(NotFittedError):
            MaxOfMeanFilter().predict_proba()

    def test_zero_observation_readout_is_prior(self):
        f = HBNIFilter(theta=[1.0, 2.0], prior=[0.3, 0.7]).reset(2)
        np.testing.assert_allclose(f.predict_proba(), [0.3, 0.7])

    def test_class_posterior_accessors(self):
        cp = ClassPosterior(np.array([0.2, 0.5, 0.3]), 4)
        assert cp.label == 2
        assert cp.confidence == pytest.approx(0.5)

    def test_make_filter_rejects_unknown(self):
        with pytest.raises(ValueError):
            make_filter("median-of-means")

    def test_get_params_round_trip(self):
        f = HBNIFilter(theta=[1.0, 2.0], prior=[0.4, 0.6], mode="median")
        params = f.get_params()
        clone = HBNIFilter(**params)
        assert clone.get_params().keys() == params.keys()
