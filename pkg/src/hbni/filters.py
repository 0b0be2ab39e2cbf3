"""Sequential classification filters over streams of simplex observations.

Four methods, each reducing an observation history o_1:N to a posterior
over the fixed underlying class:

* max-of-mean: component-wise running mean;
* voting: counts of per-observation argmax classes;
* static-state Bayes filter (SSBF): recursive Bayes update
  ``P(c|o_1:N) proportional to [o_N,c / p_c] P(c|o_1:N-1)``;
* noise-weighted filter (HBNI): class m is scored by the Dirichlet
  likelihood ``Dir(o; theta_m 1_m + 1)`` under that class's inferred
  concentration, so evidence from noisy classes is discounted.

SSBF and the noise-weighted filter accumulate log scores and normalize
through log-sum-exp on read-out, so adversarially confident streams of
any practical length cannot underflow the posterior to all-zeros.
Every filter keeps O(M) running state (O(M x S) in the sample-averaged
mode) and each class exposes both a streaming interface
(``update``/``partial_fit``) and a vectorized ``posterior_trace`` whose
read-outs are tested to match the recursive fold exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, logsumexp
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .core import as_noise_params, as_simplex, as_simplex_rows, clamp_simplex

METHODS = ("max_of_mean", "voting", "ssbf", "hbni")


@dataclass(frozen=True)
class ClassPosterior:
    """Posterior over classes after consuming ``n_observations`` inputs."""

    probs: np.ndarray
    n_observations: int

    def __post_init__(self):
        object.__setattr__(self, "probs", as_simplex(self.probs))
        if self.n_observations < 0:
            raise ValueError("n_observations must be >= 0")

    @property
    def label(self) -> int:
        return int(np.argmax(self.probs)) + 1

    @property
    def confidence(self) -> float:
        return float(np.max(self.probs))


class SequentialFilter(BaseEstimator):
    """Shared streaming plumbing for the four filter methods.

    Subclasses define the running statistic.  ``prior`` defaults to
    uniform over the class count inferred from the first input.  State
    is owned by one stream; concurrent streams use separate instances.
    """

    method = "base"

    def __init__(self, prior=None):
        self.prior = prior

    # -- state management ---------------------------------------------------

    def reset(self, n_classes: int | None = None) -> "SequentialFilter":
        """Initialize running state for a stream of ``n_classes`` outputs."""
        if n_classes is None:
            if self.prior is None:
                raise ValueError("n_classes is required when no prior is set")
            n_classes = len(self.prior)
        prior = (
            np.full(n_classes, 1.0 / n_classes)
            if self.prior is None
            else as_simplex(self.prior)
        )
        if prior.shape[0] != n_classes:
            raise ValueError("prior length does not match n_classes")
        self.prior_ = prior
        self.n_classes_ = int(n_classes)
        self.n_observations_ = 0
        self._init_state()
        return self

    def _require_state(self):
        if not hasattr(self, "prior_"):
            raise NotFittedError("filter state missing; call reset() or fit() first")

    def _ingest(self, o) -> np.ndarray:
        o = as_simplex(o)
        if not hasattr(self, "prior_"):
            self.reset(o.shape[0])
        if o.shape[0] != self.n_classes_:
            raise ValueError(f"observation has {o.shape[0]} classes, filter expects {self.n_classes_}")
        return o

    # -- streaming ----------------------------------------------------------

    def update(self, o) -> "SequentialFilter":
        """Consume a single observation vector."""
        o = self._ingest(o)
        self._accumulate(o)
        self.n_observations_ += 1
        return self

    def partial_fit(self, X, y=None) -> "SequentialFilter":
        """Consume rows of ``X`` in order, keeping existing state."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        for row in X:
            self.update(row)
        return self

    def fit(self, X, y=None) -> "SequentialFilter":
        """Reset and consume a whole history."""
        X = np.asarray(X, dtype=float)
        if X.ndim != 2:
            raise ValueError(f"expected an (N, M) history, got shape {X.shape}")
        self.reset(X.shape[1] if X.shape[1] else None)
        return self.partial_fit(X)

    # -- read-outs ----------------------------------------------------------

    def predict_proba(self) -> np.ndarray:
        """Posterior over classes given everything consumed so far."""
        self._require_state()
        if self.n_observations_ == 0:
            return self.prior_.copy()
        return self._posterior()

    def predict(self) -> int:
        """1-based argmax label; ties break toward the lowest index."""
        return int(np.argmax(self.predict_proba())) + 1

    def posterior(self) -> ClassPosterior:
        return ClassPosterior(self.predict_proba(), self.n_observations_)

    def posterior_trace(self, X) -> np.ndarray:
        """Read-out after each row of ``X`` starting from a fresh state.

        Row k equals ``predict_proba()`` after consuming ``X[:k+1]``;
        vectorized, and does not touch the instance's streaming state.
        """
        X = as_simplex_rows(np.asarray(X, dtype=float))
        fresh = type(self)(**self.get_params()).reset(X.shape[1])
        if X.shape[0] == 0:
            return np.zeros((0, fresh.n_classes_))
        return fresh._trace(X)

    # -- subclass hooks -----------------------------------------------------

    def _init_state(self):
        raise NotImplementedError

    def _accumulate(self, o: np.ndarray):
        raise NotImplementedError

    def _posterior(self) -> np.ndarray:
        raise NotImplementedError

    def _trace(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError


class MaxOfMeanFilter(SequentialFilter):
    """Posterior = running component-wise mean of the raw observations."""

    method = "max_of_mean"

    def _init_state(self):
        self.sums_ = np.zeros(self.n_classes_)

    def _accumulate(self, o):
        self.sums_ += o

    def _posterior(self):
        p = self.sums_ / self.n_observations_
        return p / p.sum()

    def _trace(self, X):
        means = np.cumsum(X, axis=0) / np.arange(1, X.shape[0] + 1)[:, None]
        return means / means.sum(axis=1, keepdims=True)


class VotingFilter(SequentialFilter):
    """Counts per-observation argmax votes; posterior = vote shares."""

    method = "voting"

    def _init_state(self):
        self.votes_ = np.zeros(self.n_classes_, dtype=np.int64)

    def _accumulate(self, o):
        self.votes_[int(np.argmax(o))] += 1

    def _posterior(self):
        return self.votes_ / self.n_observations_

    def _trace(self, X):
        onehot = np.zeros_like(X)
        onehot[np.arange(X.shape[0]), np.argmax(X, axis=1)] = 1.0
        counts = np.cumsum(onehot, axis=0)
        return counts / counts.sum(axis=1, keepdims=True)

    @property
    def vote_counts_(self) -> np.ndarray:
        self._require_state()
        return self.votes_.copy()


class StaticStateBayesFilter(SequentialFilter):
    """Recursive Bayes filter assuming one fixed underlying class.

    Each update multiplies the posterior by ``o_m / p_m`` per class, in
    log space.  Requires a strictly positive prior.
    """

    method = "ssbf"

    def reset(self, n_classes=None):
        super().reset(n_classes)
        if np.any(self.prior_ == 0):
            raise ValueError("ssbf divides by the prior; zero-probability classes are not allowed")
        return self

    def _init_state(self):
        self.log_posterior_ = np.log(np.maximum(self.prior_, 1e-300))

    def _accumulate(self, o):
        self.log_posterior_ += np.log(clamp_simplex(o)) - np.log(self.prior_)

    def _posterior(self):
        p = np.exp(self.log_posterior_ - logsumexp(self.log_posterior_))
        return p / p.sum()

    def _trace(self, X):
        lo = np.log(np.vstack([clamp_simplex(r) for r in X]))
        log_post = np.log(self.prior_) + np.cumsum(lo - np.log(self.prior_), axis=0)
        p = np.exp(log_post - logsumexp(log_post, axis=1, keepdims=True))
        return p / p.sum(axis=1, keepdims=True)


class HBNIFilter(SequentialFilter):
    """Noise-weighted recursive filter using per-class concentrations.

    Class m scores each observation with the log-density of
    ``Dir(o; theta_m 1_m + 1)``.  ``theta`` is a point estimate
    (posterior median by default upstream); passing ``theta_samples``
    with ``mode="marginal"`` instead averages the likelihood of the
    whole history over retained posterior draws of theta.
    """

    method = "hbni"

    def __init__(self, theta=None, prior=None, mode: str = "median", theta_samples=None):
        super().__init__(prior=prior)
        self.theta = theta
        self.mode = mode
        self.theta_samples = theta_samples

    def reset(self, n_classes=None):
        if self.mode not in ("median", "marginal"):
            raise ValueError("mode must be 'median' or 'marginal'")
        if self.mode == "marginal":
            if self.theta_samples is None:
                raise ValueError("marginal mode requires theta_samples")
            samples = np.atleast_2d(np.asarray(self.theta_samples, dtype=float))
            if n_classes is None and self.prior is None:
                n_classes = samples.shape[1]
        else:
            if self.theta is None:
                raise ValueError("the noise-weighted filter requires theta")
            if n_classes is None and self.prior is None:
                n_classes = len(self.theta)
        super().reset(n_classes)
        m = self.n_classes_
        if self.mode == "marginal":
            self._theta_mat = np.atleast_2d(np.asarray(self.theta_samples, dtype=float))
            if self._theta_mat.shape[1] != m:
                raise ValueError("theta_samples column count does not match n_classes")
            for row in self._theta_mat:
                as_noise_params(row, m)
        else:
            self._theta_mat = as_noise_params(self.theta, m).reshape(1, m)
        # Per-class constants of log Dir(o; theta_m 1_m + 1).
        self._log_norm = gammaln(m + self._theta_mat) - gammaln(1.0 + self._theta_mat)
        return self

    def _init_state(self):
        # (S, M) accumulated log-likelihoods; S = 1 in point-estimate mode.
        n_samples = 1 if self.mode == "median" else np.atleast_2d(self.theta_samples).shape[0]
        self.log_lik_ = np.zeros((n_samples, self.n_classes_))

    def set_noise(self, theta) -> "HBNIFilter":
        """Swap concentrations mid-stream, keeping accumulated evidence.

        Point-estimate mode only: subsequent updates score with the new
        theta while the log-likelihood totals so far are preserved.
        """
        self._require_state()
        if self.mode != "median":
            raise ValueError("mid-stream noise swaps require point-estimate mode")
        m = self.n_classes_
        self._theta_mat = as_noise_params(theta, m).reshape(1, m)
        self._log_norm = gammaln(m + self._theta_mat) - gammaln(1.0 + self._theta_mat)
        self.theta = np.asarray(theta, dtype=float)
        return self

    def _accumulate(self, o):
        lo = np.log(clamp_simplex(o))
        self.log_lik_ += self._theta_mat * lo[None, :] + self._log_norm

    def _logits(self, log_lik):
        with np.errstate(divide="ignore"):
            log_prior = np.log(self.prior_)
        if log_lik.shape[0] == 1:
            return log_prior + log_lik[0]
        return log_prior + logsumexp(log_lik, axis=0) - np.log(log_lik.shape[0])

    def _posterior(self):
        logits = self._logits(self.log_lik_)
        p = np.exp(logits - logsumexp(logits))
        return p / p.sum()

    def _trace(self, X):
        lo = np.log(np.vstack([clamp_simplex(r) for r in X]))
        # (N, S, M) per-observation increments, cumulated along N.
        inc = self._theta_mat[None, :, :] * lo[:, None, :] + self._log_norm[None, :, :]
        cum = np.cumsum(inc, axis=0)
        out = np.empty((X.shape[0], self.n_classes_))
        for k in range(X.shape[0]):
            logits = self._logits(cum[k])
            p = np.exp(logits - logsumexp(logits))
            out[k] = p / p.sum()
        return out


_FILTER_CLASSES = {
    "max_of_mean": MaxOfMeanFilter,
    "voting": VotingFilter,
    "ssbf": StaticStateBayesFilter,
    "hbni": HBNIFilter,
}


def make_filter(method: str, prior=None, theta=None, mode: str = "median",
                theta_samples=None) -> SequentialFilter:
    """Construct a filter by method name."""
    if method not in _FILTER_CLASSES:
        raise ValueError(f"unknown filter method {method!r}; expected one of {METHODS}")
    if method == "hbni":
        return HBNIFilter(theta=theta, prior=prior, mode=mode, theta_samples=theta_samples)
    return _FILTER_CLASSES[method](prior=prior)


def max_of_mean(history) -> ClassPosterior:
    """Component-wise mean of a non-empty history."""
    X = np.asarray(history, dtype=float)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ValueError("max_of_mean requires a non-empty (N, M) history")
    filt = MaxOfMeanFilter().fit(X)
    return filt.posterior()


def vote(history) -> tuple[int, np.ndarray]:
    """Majority vote over per-observation argmax labels.

    Returns the winning 1-based label (ties to the lowest index) and
    the per-class vote counts.
    """
    X = np.asarray(history, dtype=float)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ValueError("vote requires a non-empty (N, M) history")
    filt = VotingFilter().fit(X)
    return filt.predict(), filt.vote_counts_


def batch(method: str, history, prior=None, theta=None, mode: str = "median",
          theta_samples=None) -> ClassPosterior:
    """Posterior from folding a fresh filter over ``history``.

    An empty history returns the prior (uniform when unset), in which
    case the class count must be recoverable from ``prior`` or
    ``theta``.
    """
    filt = make_filter(method, prior=prior, theta=theta, mode=mode, theta_samples=theta_samples)
    X = np.asarray(history, dtype=float)
    if X.ndim == 2 and X.shape[0] > 0:
        filt.fit(X)
    else:
        filt.reset(X.shape[1] if X.ndim == 2 and X.shape[1] >= 2 else None)
    return filt.posterior()
