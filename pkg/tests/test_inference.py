"""Posterior sampler: correctness oracles, determinism, and summaries."""

import math

import numpy as np
import pytest
from scipy.special import gammaln

import hbni.inference as inference
from hbni.core import HyperParams, ObservationSequence, clamp_simplex, log_gamma_density
from hbni.genmodel import GenerativeConfig, generate_dataset, sample_observations
from hbni.inference import (
    CHUNK_ITERATIONS,
    ChainState,
    MHConfig,
    NoiseInference,
    _run_sweeps_py,
    hyperprior_for_theta_median,
    implied_theta_median,
    initial_state,
    log_joint,
    mh_step,
    run_chain,
    summarize_noise_posterior,
)
from hbni.rng import DOMAIN_CHAIN, child_rng, root_rng

UNIFORM2 = np.array([0.5, 0.5])
UNIFORM3 = np.array([1 / 3, 1 / 3, 1 / 3])


def threeclass_data(seed=42, per_class=5, stream=0):
    cfg = GenerativeConfig(n_classes=3, theta=[1.0, 6.0, 20.0], seed=seed)
    return generate_dataset(cfg, per_class=per_class, stream_index=stream)


def grid_posterior(obs_rows, kappa, gamma, grid):
    """Quadrature posterior over a single class's concentration.

    Independent oracle: evaluates the likelihood of labeled-class rows
    directly on a dense grid and normalizes the trapezoid weights.
    """
    lo = np.log(np.vstack([clamp_simplex(r) for r in obs_rows]))
    n, m = lo.shape
    s = lo[:, 0].sum()
    logpost = n * (gammaln(m + grid) - gammaln(1 + grid)) + grid * s
    logpost += (kappa - 1.0) * np.log(grid) - grid / gamma
    w = np.exp(logpost - logpost.max())
    w /= w.sum()
    return w


class TestMHConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            MHConfig(iterations=10, burn_in=10)
        with pytest.raises(ValueError):
            MHConfig(thinning=0)
        with pytest.raises(ValueError):
            MHConfig(w_stay=1.0)
        with pytest.raises(ValueError):
            MHConfig(proposal_std_theta=-0.1)
        with pytest.raises(ValueError):
            MHConfig(init_labels="truth")

    def test_dict_round_trip(self):
        cfg = MHConfig(iterations=100, burn_in=10, seed=3, clamp_labels=True)
        assert MHConfig.from_dict(cfg.to_dict()) == cfg


class TestLogJoint:
    def test_empty_data_is_prior_only(self):
        hp = HyperParams(kappa=2.0, gamma=2.0, beta=2.0, eta=2.0, nu=2.0, omega=2.0)
        theta = np.array([1.5, 4.0])
        state = ChainState(np.zeros(0, dtype=int), theta, 3.0, 1.2, 0.0)
        data = ObservationSequence(np.empty((0, 2)))
        got = log_joint(state, data, UNIFORM2, hp)
        want = (
            sum(log_gamma_density(t, 3.0, 1.2) for t in theta)
            + log_gamma_density(3.0, hp.beta, hp.eta)
            + log_gamma_density(1.2, hp.nu, hp.omega)
        )
        assert got == pytest.approx(want, abs=1e-12)

    def test_single_observation_term_by_term(self):
        from hbni.core import log_categorical, log_dirichlet_generic

        hp = HyperParams(kappa=2.0, gamma=2.0)
        o = np.array([0.7, 0.3])
        data = ObservationSequence(o.reshape(1, 2))
        state = ChainState(np.array([1]), np.array([1.0, 1.0]), 2.0, 2.0, 0.0)
        got = log_joint(state, data, UNIFORM2, hp)
        want = (
            log_dirichlet_generic(o, [2.0, 1.0])
            + log_categorical(1, UNIFORM2)
            + 2 * log_gamma_density(1.0, 2.0, 2.0)
            + log_gamma_density(2.0, hp.beta, hp.eta)
            + log_gamma_density(2.0, hp.nu, hp.omega)
        )
        assert got == pytest.approx(want, abs=1e-12)

    def test_likelihood_term_increases_before_its_peak(self):
        # d/dtheta of the per-observation term is log(o_c) + sum_j 1/(j+theta);
        # it stays positive while theta is below the root, so the term rises
        # on a grid capped under that root.
        o_c = 0.9
        grid = np.linspace(0.0, 10.0, 60)
        assert math.log(o_c) + 1.0 / (1.0 + grid[-1]) + 1.0 / (2.0 + grid[-1]) > 0
        vals = [
            -gammaln(1.0 + t) + gammaln(3.0 + t) + t * math.log(o_c) for t in grid
        ]
        assert np.all(np.diff(vals) > 0)

    def test_dimension_mismatch(self):
        hp = HyperParams()
        data = ObservationSequence(np.array([[0.5, 0.5]]))
        state = ChainState(np.array([1, 1]), np.array([1.0, 1.0]), 2.0, 2.0, 0.0)
        with pytest.raises(ValueError):
            log_joint(state, data, UNIFORM2, hp)


class TestMHStep:
    def test_stay_proposals_always_accept(self):
        data = threeclass_data(per_class=2)
        hp = HyperParams()
        cfg = MHConfig(iterations=10, burn_in=0, w_stay=0.999, seed=0)
        rng = root_rng(0)
        state = initial_state(data, UNIFORM3, hp, cfg, rng)
        _, info = mh_step(state, data, UNIFORM3, hp, cfg, rng=rng)
        # With w_stay ~ 1 nearly every label proposal is the current class,
        # which has ratio 1 and must be accepted.
        assert info.accepted["labels"] >= 5

    def test_zero_stddev_freezes_continuous_blocks(self):
        data = threeclass_data(per_class=2)
        hp = HyperParams()
        cfg = MHConfig(
            iterations=10,
            burn_in=0,
            proposal_std_theta=0.0,
            proposal_std_kappa=0.0,
            proposal_std_gamma=0.0,
            seed=1,
        )
        rng = root_rng(1)
        state = initial_state(data, UNIFORM3, hp, cfg, rng)
        theta0, kappa0, gamma0 = state.theta.copy(), state.kappa, state.gamma
        for _ in range(25):
            state, _ = mh_step(state, data, UNIFORM3, hp, cfg, rng=rng)
        np.testing.assert_array_equal(state.theta, theta0)
        assert state.kappa == kappa0 and state.gamma == gamma0

    def test_cached_log_posterior_stays_consistent(self):
        data = threeclass_data(per_class=3)
        hp = HyperParams()
        cfg = MHConfig(iterations=10, burn_in=0, seed=2)
        rng = root_rng(2)
        state = initial_state(data, UNIFORM3, hp, cfg, rng)
        for _ in range(40):
            state, _ = mh_step(
                state, data, UNIFORM3, hp, cfg, rng=rng, debug_recompute=True
            )
        ref = log_joint(state, data, UNIFORM3, hp)
        assert state.log_posterior == pytest.approx(ref, abs=1e-8)

    def test_clamped_labels_never_move(self):
        data = threeclass_data(per_class=3)
        hp = HyperParams()
        cfg = MHConfig(iterations=10, burn_in=0, clamp_labels=True, seed=3)
        rng = root_rng(3)
        state = initial_state(data, UNIFORM3, hp, cfg, rng)
        labels0 = state.labels.copy()
        for _ in range(20):
            state, info = mh_step(state, data, UNIFORM3, hp, cfg, rng=rng)
        np.testing.assert_array_equal(state.labels, labels0)
        assert info.proposed["labels"] == 0


class TestRunChain:
    def test_deterministic_given_seed(self):
        data = threeclass_data()
        cfg = MHConfig(iterations=3000, burn_in=500, thinning=5, seed=9)
        a = run_chain(data, config=cfg)
        b = run_chain(data, config=cfg)
        for key in a.samples:
            np.testing.assert_array_equal(a.samples[key], b.samples[key])
        assert a.medians == b.medians

    def test_chain_indices_differ(self):
        data = threeclass_data()
        cfg = MHConfig(iterations=3000, burn_in=500, thinning=5, seed=9)
        a = run_chain(data, config=cfg, chain_index=0)
        b = run_chain(data, config=cfg, chain_index=1)
        assert not np.array_equal(a.samples["theta_1"], b.samples["theta_1"])

    def test_requires_observations(self):
        with pytest.raises(ValueError):
            run_chain(ObservationSequence(np.empty((0, 3))), config=MHConfig(seed=0))

    def test_medians_inside_intervals(self):
        data = threeclass_data()
        s = run_chain(data, config=MHConfig(iterations=4000, burn_in=1000, seed=4))
        for key, med in s.medians.items():
            lo, hi = s.intervals[key]
            assert lo <= med <= hi

    def test_acceptance_rates_in_tuning_band(self):
        # Continuous blocks on the 15-observation reference problem.
        data = threeclass_data()
        s = run_chain(data, config=MHConfig(iterations=20_000, burn_in=5000, seed=5))
        for block in ("theta", "kappa", "gamma"):
            assert 0.1 <= s.acceptance[block] <= 0.7

    def test_mh_step_fold_reproduces_kernel_chain(self):
        # The readable sweep and the chunked kernel must produce the same
        # trajectory from the same pre-drawn randomness.
        data = threeclass_data(per_class=4, seed=11)
        prior = UNIFORM3
        hp = HyperParams()
        cfg = MHConfig(iterations=900, burn_in=100, thinning=7, seed=13)
        summary = run_chain(data, prior=prior, config=cfg, hyper=hp)

        rng = child_rng(cfg.seed, DOMAIN_CHAIN, 0)
        state = initial_state(data, prior, hp, cfg, rng)
        n, m = len(data), data.n_classes
        kept = {"theta": [], "kappa": [], "gamma": [], "logpost": []}
        start = 0
        while start < cfg.iterations:
            b = min(CHUNK_ITERATIONS, cfg.iterations - start)
            u_c = rng.random((b, n))
            u_c_acc = rng.random((b, n))
            z_t = rng.standard_normal((b, m))
            u_t_acc = rng.random((b, m))
            z_k = rng.standard_normal(b)
            u_k = rng.random(b)
            z_g = rng.standard_normal(b)
            u_g = rng.random(b)
            for t in range(b):
                randoms = dict(
                    u_c=u_c[t], u_c_acc=u_c_acc[t], z_theta=z_t[t], u_theta_acc=u_t_acc[t],
                    z_kappa=z_k[t], u_kappa_acc=u_k[t], z_gamma=z_g[t], u_gamma_acc=u_g[t],
                )
                state, _ = mh_step(state, data, prior, hp, cfg, randoms=randoms)
                tg = start + t
                if tg >= cfg.burn_in and (tg - cfg.burn_in) % cfg.thinning == 0:
                    kept["theta"].append(state.theta.copy())
                    kept["kappa"].append(state.kappa)
                    kept["gamma"].append(state.gamma)
                    kept["logpost"].append(state.log_posterior)
            start += b

        theta = np.array(kept["theta"])
        for j in range(3):
            np.testing.assert_array_equal(theta[:, j], summary.samples[f"theta_{j + 1}"])
        np.testing.assert_array_equal(kept["kappa"], summary.samples["kappa"])
        np.testing.assert_array_equal(kept["gamma"], summary.samples["gamma"])
        np.testing.assert_allclose(
            kept["logpost"], summary.samples["log_posterior"], atol=1e-10
        )

    def test_compiled_kernel_matches_pure_python(self, monkeypatch):
        data = threeclass_data(per_class=3, seed=19)
        cfg = MHConfig(iterations=800, burn_in=100, thinning=3, seed=23)
        fast = run_chain(data, config=cfg)
        monkeypatch.setattr(inference, "_run_sweeps", _run_sweeps_py)
        slow = run_chain(data, config=cfg)
        for key in fast.samples:
            if key == "log_posterior":
                # Compilation may reorder the running-sum arithmetic; the
                # cache is allowed to drift in the last ulps.
                np.testing.assert_allclose(fast.samples[key], slow.samples[key], atol=1e-10)
            else:
                np.testing.assert_array_equal(fast.samples[key], slow.samples[key])

    def test_one_hot_streak_pushes_theta_up_with_n(self):
        # Identical one-hot observations: the likelihood in theta keeps
        # growing, so both the quadrature and the chain medians must rise
        # with the stream length.
        grid = np.linspace(1e-3, 2000.0, 8000)
        kappa, gamma = 2.0, 2.0
        hp = HyperParams(kappa=kappa, gamma=gamma)
        grid_medians, chain_medians = [], []
        for n in (2, 8, 32):
            rows = np.tile([1.0, 0.0], (n, 1))
            w = grid_posterior(rows, kappa, gamma, grid)
            grid_medians.append(float(np.interp(0.5, np.cumsum(w), grid)))
            data = ObservationSequence(rows, np.ones(n, dtype=int))
            cfg = MHConfig(
                iterations=20_000, burn_in=4000, thinning=4, seed=29,
                clamp_labels=True, sample_hyperparams=False,
            )
            s = run_chain(data, config=cfg, hyper=hp)
            chain_medians.append(s.medians["theta_1"])
        assert grid_medians[0] < grid_medians[1] < grid_medians[2]
        assert chain_medians[0] < chain_medians[1] < chain_medians[2]

    def test_single_class_chain_matches_grid_oracle(self):
        # Smaller sibling of the acceptance criterion.
        rng = root_rng(123)
        obs = sample_observations(1, np.array([3.0, 0.0]), 10, rng)
        data = ObservationSequence(obs, np.ones(10, dtype=int))
        kappa, gamma = 2.0, 2.0
        grid = np.linspace(1e-4, 200.0, 2000)
        w = grid_posterior(obs, kappa, gamma, grid)
        cdf = np.cumsum(w)
        cfg = MHConfig(
            iterations=60_000, burn_in=10_000, thinning=5, seed=31,
            clamp_labels=True, sample_hyperparams=False,
        )
        s = run_chain(data, config=cfg, hyper=HyperParams(kappa=kappa, gamma=gamma))
        th = s.samples["theta_1"]
        med_grid = float(np.interp(0.5, cdf, grid))
        assert abs(np.median(th) - med_grid) / med_grid < 0.05
        emp = np.searchsorted(np.sort(th), grid, side="right") / th.shape[0]
        assert np.max(np.abs(emp - cdf)) < 0.03

    def test_geweke_joint_distribution_check(self):
        # Marginal-conditional vs successive-conditional simulators on a
        # one-class toy: matching first two moments of theta within 3 sigma.
        hp = HyperParams(kappa=2.0, gamma=2.0)
        cfg = MHConfig(
            iterations=10, burn_in=0, thinning=1, seed=0,
            clamp_labels=True, sample_hyperparams=False,
        )
        prior = UNIFORM2
        labels = np.ones(3, dtype=int)
        rng = root_rng(2024)
        draws = 8000

        marginal = rng.standard_gamma(2.0, draws) * 2.0

        theta = rng.standard_gamma(2.0, 2) * 2.0
        successive = np.empty(draws)
        for k in range(draws):
            obs = sample_observations(1, theta, 3, rng)
            data = ObservationSequence(obs, labels)
            state = ChainState(labels.copy(), theta.copy(), hp.kappa, hp.gamma, 0.0)
            state.log_posterior = log_joint(state, data, prior, hp)
            for _ in range(2):
                state, _ = mh_step(state, data, prior, hp, cfg, rng=rng)
            theta = state.theta
            successive[k] = theta[0]

        def batch_se(x, nb=80):
            bm = x[: len(x) // nb * nb].reshape(nb, -1).mean(axis=1)
            return bm.std(ddof=1) / math.sqrt(nb)

        for transform in (lambda x: x, lambda x: x**2):
            a, b = transform(marginal), transform(successive)
            se = math.hypot(a.std(ddof=1) / math.sqrt(draws), batch_se(b))
            assert abs(a.mean() - b.mean()) < 3.0 * se


class TestSummaries:
    def _constant_summary(self, value=4.0, m=2):
        data = ObservationSequence(np.array([[0.6, 0.4]]), np.array([1]))
        cfg = MHConfig(
            iterations=40, burn_in=10, thinning=1, seed=0,
            clamp_labels=True, sample_hyperparams=False,
            proposal_std_theta=0.0,
        )
        return run_chain(data, config=cfg, hyper=HyperParams(kappa=2.0, gamma=2.0))

    def test_constant_chain_median_is_that_constant(self):
        s = self._constant_summary()
        assert np.ptp(s.samples["theta_1"]) == 0.0
        assert s.medians["theta_1"] == s.samples["theta_1"][0]

    def test_median_of_three(self):
        s = self._constant_summary()
        s.samples["theta_1"] = np.array([1.0, 2.0, 3.0])
        s.samples["theta_2"] = np.array([5.0, 4.0, 6.0])
        est = summarize_noise_posterior(s)
        np.testing.assert_allclose(est, [2.0, 5.0])

    def test_mean_option(self):
        s = self._constant_summary()
        s.samples["theta_1"] = np.array([1.0, 2.0, 6.0])
        s.samples["theta_2"] = np.array([2.0, 2.0, 2.0])
        np.testing.assert_allclose(summarize_noise_posterior(s, "mean"), [3.0, 2.0])

    def test_rejects_unknown_method(self):
        with pytest.raises(ValueError):
            summarize_noise_posterior(self._constant_summary(), "mode")


class TestHyperpriorHelpers:
    def test_implied_median_round_trip(self):
        hp = hyperprior_for_theta_median(100.0)
        assert implied_theta_median(hp.kappa, hp.gamma) == pytest.approx(100.0, rel=1e-9)

    def test_other_targets(self):
        for target in (5.0, 40.0):
            hp = hyperprior_for_theta_median(target)
            assert implied_theta_median(hp.kappa, hp.gamma) == pytest.approx(target, rel=1e-9)

    def test_rejects_nonpositive_target(self):
        with pytest.raises(ValueError):
            hyperprior_for_theta_median(0.0)


class TestNoiseInferenceEstimator:
    def test_fit_exposes_attributes(self):
        data = threeclass_data()
        est = NoiseInference(iterations=3000, burn_in=500, thinning=5, seed=1)
        est.fit(data.observations)
        assert est.theta_.shape == (3,)
        assert est.kappa_ > 0 and est.gamma_ > 0
        assert set(est.acceptance_) == {"labels", "theta", "kappa", "gamma"}

    def test_clamped_fit_uses_labels(self):
        data = threeclass_data()
        est = NoiseInference(
            iterations=3000, burn_in=500, thinning=5, seed=1, clamp_labels=True
        )
        est.fit(data.observations, data.labels)
        assert math.isnan(est.acceptance_["labels"])

    def test_get_params_round_trip(self):
        est = NoiseInference(iterations=123, w_stay=0.7)
        params = est.get_params()
        clone = NoiseInference(**params)
        assert clone.get_params() == params
