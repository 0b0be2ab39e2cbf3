"""Metropolis-Hastings posterior inference over (c_1:N, theta_1:M, kappa, gamma).

The target is the joint posterior of per-observation class labels,
per-class Dirichlet concentrations, and the shared gamma-prior
hyperparameters, given a stream of simplex observations.  One sweep
updates four blocks:

* each label c_i from an asymmetric categorical proposal that keeps the
  current class with weight ``w_stay`` and moves uniformly otherwise
  (the proposal matrix is symmetric, so its MH correction term is 0);
* each log(theta_m) by a Gaussian random walk;
* log(kappa) and log(gamma) by Gaussian random walks.

Log-scale random walks carry the usual +log(x') - log(x) Jacobian term
in the acceptance ratio.  Given labels, both the theta updates (across
m) and the label updates (across i) factorize, so the hot loop only
touches per-class sufficient statistics: the member count n_m and the
sum S_m of log o_{i,m} over members.

Two implementations of the sweep exist and are tested against each
other: :func:`mh_step` (readable, one sweep at a time) and the chunked
kernel used by :func:`run_chain` (numba-compiled when available, with an
identical pure-Python fallback).  All randomness is pre-drawn from a
numpy Generator in a fixed per-iteration layout, so results do not
depend on whether numba is installed.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from sklearn.base import BaseEstimator

from .core import (
    HyperParams,
    ObservationSequence,
    as_simplex,
    clamp_simplex,
    gamma_median,
    log_categorical,
    log_dirichlet_hbni,
    log_gamma_density,
)
from .rng import DOMAIN_CHAIN, child_rng

# Iterations per pre-drawn randomness chunk. Fixed: changing it changes
# the stream layout and therefore chain trajectories.
CHUNK_ITERATIONS = 4096

_BLOCKS = ("labels", "theta", "kappa", "gamma")


@dataclass(frozen=True)
class MHConfig:
    """Sampler settings.

    ``w_stay`` is the categorical proposal weight on the current class.
    ``clamp_labels`` fixes c_i to the dataset's true labels (calibration
    mode); ``sample_hyperparams=False`` freezes kappa and gamma at their
    initial values.  ``init_labels`` is "random" (uniform) or "argmax".
    """

    iterations: int = 50_000
    burn_in: int = 10_000
    thinning: int = 10
    proposal_std_theta: float = 0.5
    proposal_std_kappa: float = 0.5
    proposal_std_gamma: float = 0.5
    w_stay: float = 0.8
    seed: int = 0
    clamp_labels: bool = False
    sample_hyperparams: bool = True
    init_labels: str = "random"
    ci_level: float = 0.9

    def __post_init__(self):
        if not self.iterations > self.burn_in >= 0:
            raise ValueError("need iterations > burn_in >= 0")
        if self.thinning < 1:
            raise ValueError("thinning must be >= 1")
        if not 0.0 < self.w_stay < 1.0:
            raise ValueError("w_stay must lie strictly between 0 and 1")
        for name in ("proposal_std_theta", "proposal_std_kappa", "proposal_std_gamma"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.init_labels not in ("random", "argmax"):
            raise ValueError("init_labels must be 'random' or 'argmax'")
        if not 0.0 < self.ci_level < 1.0:
            raise ValueError("ci_level must lie strictly between 0 and 1")

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}

    @classmethod
    def from_dict(cls, d: dict) -> "MHConfig":
        return cls(**{k: d[k] for k in cls.__dataclass_fields__ if k in d})


@dataclass
class ChainState:
    """One MCMC state: 1-based labels, noise levels, hyperparameters.

    ``log_posterior`` caches the joint log-density; it is maintained
    incrementally and must match a from-scratch :func:`log_joint`
    recomputation within 1e-8.
    """

    labels: np.ndarray
    theta: np.ndarray
    kappa: float
    gamma: float
    log_posterior: float


@dataclass
class StepInfo:
    """Per-block proposal/acceptance counts for one or more sweeps."""

    proposed: dict = field(default_factory=lambda: {b: 0 for b in _BLOCKS})
    accepted: dict = field(default_factory=lambda: {b: 0 for b in _BLOCKS})

    def rates(self) -> dict:
        return {
            b: (self.accepted[b] / self.proposed[b]) if self.proposed[b] else float("nan")
            for b in _BLOCKS
        }


@dataclass
class ChainSummary:
    """Thinned post-burn-in samples plus the summaries used downstream."""

    samples: dict
    medians: dict
    intervals: dict
    acceptance: dict
    config: MHConfig
    hyper: HyperParams
    prior: np.ndarray
    n_observations: int
    n_classes: int

    @property
    def n_samples(self) -> int:
        return len(self.samples["kappa"])

    def theta_matrix(self) -> np.ndarray:
        """Retained theta draws as an (S, M) matrix."""
        return np.column_stack([self.samples[f"theta_{m}"] for m in range(1, self.n_classes + 1)])


def log_joint(state: ChainState, data: ObservationSequence, prior, hyper: HyperParams) -> float:
    """Joint log-density recomputed from scratch with the core primitives.

    Observation rows are clamped (:data:`~hbni.core.CLAMP_EPS`) exactly
    as the sampler does.  Uses fully normalized gamma densities; the
    sampler's kernel-only differences agree because the dropped
    constants never depend on the sampled quantities.
    """
    if len(data) and data.n_classes != state.theta.shape[0]:
        raise ValueError("data and state disagree on the number of classes")
    if len(state.labels) != len(data):
        raise ValueError("state has labels for a different number of observations")
    prior = as_simplex(prior)
    total = 0.0
    for i in range(len(data)):
        o = clamp_simplex(data.observations[i])
        c = int(state.labels[i])
        total += log_dirichlet_hbni(o, c, state.theta[c - 1])
        total += log_categorical(c, prior)
    for th in state.theta:
        total += log_gamma_density(th, state.kappa, state.gamma)
    total += log_gamma_density(state.kappa, hyper.beta, hyper.eta)
    total += log_gamma_density(state.gamma, hyper.nu, hyper.omega)
    return total


# ---------------------------------------------------------------------------
# Sweep implementations
# ---------------------------------------------------------------------------
#
# Randomness layout per sweep (consumed in this order):
#   label block (skipped when clamped): u_c[N] proposal, u_acc[N] accept
#   theta block: z[M] normal, u_acc[M]
#   hyper block (skipped when frozen): z_kappa, u_kappa, z_gamma, u_gamma


def _propose_class(u: float, current: int, m: int, w_stay: float) -> int:
    """Asymmetric categorical proposal from a single uniform draw."""
    if u < w_stay:
        return current
    v = (u - w_stay) / (1.0 - w_stay)
    k = int(v * (m - 1))
    if k > m - 2:
        k = m - 2
    return k if k < current else k + 1


def draw_sweep_randoms(rng: np.random.Generator, n: int, m: int,
                       sample_labels: bool, sample_hyper: bool) -> dict:
    """Draw one sweep's randomness in the documented layout."""
    r = {}
    if sample_labels:
        r["u_c"] = rng.random(n)
        r["u_c_acc"] = rng.random(n)
    r["z_theta"] = rng.standard_normal(m)
    r["u_theta_acc"] = rng.random(m)
    if sample_hyper:
        r["z_kappa"] = rng.standard_normal()
        r["u_kappa_acc"] = rng.random()
        r["z_gamma"] = rng.standard_normal()
        r["u_gamma_acc"] = rng.random()
    return r


def mh_step(
    state: ChainState,
    data: ObservationSequence,
    prior,
    hyper: HyperParams,
    config: MHConfig,
    rng: np.random.Generator | None = None,
    randoms: dict | None = None,
    debug_recompute: bool = False,
) -> tuple[ChainState, StepInfo]:
    """One full MH sweep over all blocks; readable reference path.

    ``randoms`` injects pre-drawn randomness (see
    :func:`draw_sweep_randoms`); otherwise it is drawn from ``rng``.
    With ``debug_recompute`` the cached log-posterior is checked against
    :func:`log_joint` after every accepted block update.
    """
    prior = as_simplex(prior)
    n = len(data)
    m = data.n_classes
    sample_labels = not config.clamp_labels
    if randoms is None:
        if rng is None:
            raise ValueError("need either rng or pre-drawn randoms")
        randoms = draw_sweep_randoms(rng, n, m, sample_labels, config.sample_hyperparams)

    lo = np.log(np.vstack([clamp_simplex(row) for row in data.observations])) if n else np.zeros((0, m))
    logp = np.log(prior)
    c = state.labels.astype(int) - 1
    theta = state.theta.copy()
    kappa, gamma, logpost = state.kappa, state.gamma, state.log_posterior
    lg1 = np.array([math.lgamma(1.0 + t) for t in theta])
    lgm = np.array([math.lgamma(m + t) for t in theta])
    info = StepInfo()

    def check(tag):
        if debug_recompute:
            ref = log_joint(
                ChainState(c + 1, theta.copy(), kappa, gamma, 0.0), data, prior, hyper
            )
            if abs(ref - logpost) > 1e-8:
                raise AssertionError(f"cached log-posterior drifted after {tag}: {logpost} vs {ref}")

    if sample_labels:
        for i in range(n):
            cp = _propose_class(float(randoms["u_c"][i]), int(c[i]), m, config.w_stay)
            info.proposed["labels"] += 1
            ci = int(c[i])
            if cp == ci:
                info.accepted["labels"] += 1
                continue
            # Proposal matrix is symmetric: correction term is zero.
            delta = (lgm[cp] - lg1[cp] + theta[cp] * lo[i, cp] + logp[cp]) - (
                lgm[ci] - lg1[ci] + theta[ci] * lo[i, ci] + logp[ci]
            )
            if math.log(randoms["u_c_acc"][i]) < delta:
                info.accepted["labels"] += 1
                c[i] = cp
                logpost += delta
                check(f"label {i}")

    counts = np.bincount(c, minlength=m).astype(float)
    s_sums = np.zeros(m)
    for i in range(n):
        s_sums[c[i]] += lo[i, c[i]]

    for j in range(m):
        info.proposed["theta"] += 1
        th = theta[j]
        thp = th * math.exp(config.proposal_std_theta * float(randoms["z_theta"][j]))
        lg1p = math.lgamma(1.0 + thp)
        lgmp = math.lgamma(m + thp)
        d_data = counts[j] * ((lgmp - lgm[j]) - (lg1p - lg1[j])) + (thp - th) * s_sums[j]
        d_prior = (kappa - 1.0) * (math.log(thp) - math.log(th)) - (thp - th) / gamma
        d_jac = math.log(thp) - math.log(th)
        if math.log(randoms["u_theta_acc"][j]) < d_data + d_prior + d_jac:
            info.accepted["theta"] += 1
            theta[j] = thp
            lg1[j], lgm[j] = lg1p, lgmp
            logpost += d_data + d_prior
            check(f"theta {j}")

    if config.sample_hyperparams:
        t_log = float(np.sum(np.log(theta)))
        t_sum = float(np.sum(theta))

        info.proposed["kappa"] += 1
        kp = kappa * math.exp(config.proposal_std_kappa * float(randoms["z_kappa"]))
        d = (
            (kp - kappa) * t_log
            - m * (math.lgamma(kp) - math.lgamma(kappa))
            - m * (kp - kappa) * math.log(gamma)
            + (hyper.beta - 1.0) * (math.log(kp) - math.log(kappa))
            - (kp - kappa) / hyper.eta
        )
        if math.log(randoms["u_kappa_acc"]) < d + (math.log(kp) - math.log(kappa)):
            info.accepted["kappa"] += 1
            kappa = kp
            logpost += d
            check("kappa")

        info.proposed["gamma"] += 1
        gp = gamma * math.exp(config.proposal_std_gamma * float(randoms["z_gamma"]))
        d = (
            -t_sum * (1.0 / gp - 1.0 / gamma)
            - m * kappa * (math.log(gp) - math.log(gamma))
            + (hyper.nu - 1.0) * (math.log(gp) - math.log(gamma))
            - (gp - gamma) / hyper.omega
        )
        if math.log(randoms["u_gamma_acc"]) < d + (math.log(gp) - math.log(gamma)):
            info.accepted["gamma"] += 1
            gamma = gp
            logpost += d
            check("gamma")

    return ChainState(c + 1, theta, kappa, gamma, logpost), info


def _run_sweeps_py(
    c, theta, scalars, lo, logp, counts, s_sums, lg1, lgm,
    w_stay, std_t, std_k, std_g, beta, eta, nu, omega,
    sample_labels, sample_hyper,
    u_c, u_c_acc, z_t, u_t_acc, z_k, u_k_acc, z_g, u_g_acc,
    record_at, out_theta, out_kappa, out_gamma, out_logpost,
    proposed, accepted,
):
    """Chunked sweep kernel; numba-compiled when available.

    Mutates the state arrays in place.  ``scalars`` holds
    [kappa, gamma, log_posterior]; ``record_at[t]`` is the output slot
    for iteration t of this chunk, or -1.  Arithmetic mirrors
    :func:`mh_step` expression by expression so both paths produce
    identical chains from identical pre-drawn randomness.
    """
    n = c.shape[0]
    m = theta.shape[0]
    iters = record_at.shape[0]
    kappa = scalars[0]
    gamma = scalars[1]
    logpost = scalars[2]
    for t in range(iters):
        if sample_labels:
            for i in range(n):
                u = u_c[t, i]
                ci = c[i]
                if u < w_stay:
                    cp = ci
                else:
                    v = (u - w_stay) / (1.0 - w_stay)
                    k = int(v * (m - 1))
                    if k > m - 2:
                        k = m - 2
                    cp = k if k < ci else k + 1
                proposed[0] += 1
                if cp == ci:
                    accepted[0] += 1
                    continue
                delta = (lgm[cp] - lg1[cp] + theta[cp] * lo[i, cp] + logp[cp]) - (
                    lgm[ci] - lg1[ci] + theta[ci] * lo[i, ci] + logp[ci]
                )
                if math.log(u_c_acc[t, i]) < delta:
                    accepted[0] += 1
                    counts[ci] -= 1.0
                    counts[cp] += 1.0
                    s_sums[ci] -= lo[i, ci]
                    s_sums[cp] += lo[i, cp]
                    c[i] = cp
                    logpost += delta

        for j in range(m):
            proposed[1] += 1
            th = theta[j]
            thp = th * math.exp(std_t * z_t[t, j])
            lg1p = math.lgamma(1.0 + thp)
            lgmp = math.lgamma(m + thp)
            d_data = counts[j] * ((lgmp - lgm[j]) - (lg1p - lg1[j])) + (thp - th) * s_sums[j]
            d_prior = (kappa - 1.0) * (math.log(thp) - math.log(th)) - (thp - th) / gamma
            d_jac = math.log(thp) - math.log(th)
            if math.log(u_t_acc[t, j]) < d_data + d_prior + d_jac:
                accepted[1] += 1
                theta[j] = thp
                lg1[j] = lg1p
                lgm[j] = lgmp
                logpost += d_data + d_prior

        if sample_hyper:
            t_log = 0.0
            t_sum = 0.0
            for j in range(m):
                t_log += math.log(theta[j])
                t_sum += theta[j]

            proposed[2] += 1
            kp = kappa * math.exp(std_k * z_k[t])
            d = (
                (kp - kappa) * t_log
                - m * (math.lgamma(kp) - math.lgamma(kappa))
                - m * (kp - kappa) * math.log(gamma)
                + (beta - 1.0) * (math.log(kp) - math.log(kappa))
                - (kp - kappa) / eta
            )
            if math.log(u_k_acc[t]) < d + (math.log(kp) - math.log(kappa)):
                accepted[2] += 1
                kappa = kp
                logpost += d

            proposed[3] += 1
            gp = gamma * math.exp(std_g * z_g[t])
            d = (
                -t_sum * (1.0 / gp - 1.0 / gamma)
                - m * kappa * (math.log(gp) - math.log(gamma))
                + (nu - 1.0) * (math.log(gp) - math.log(gamma))
                - (gp - gamma) / omega
            )
            if math.log(u_g_acc[t]) < d + (math.log(gp) - math.log(gamma)):
                accepted[3] += 1
                gamma = gp
                logpost += d

        r = record_at[t]
        if r >= 0:
            for j in range(m):
                out_theta[r, j] = theta[j]
            out_kappa[r] = kappa
            out_gamma[r] = gamma
            out_logpost[r] = logpost
    scalars[0] = kappa
    scalars[1] = gamma
    scalars[2] = logpost


try:  # pragma: no cover - exercised indirectly by the equivalence tests
    import numba

    _run_sweeps = numba.njit(cache=True)(_run_sweeps_py)
except ImportError:  # pragma: no cover
    _run_sweeps = _run_sweeps_py


def initial_state(
    data: ObservationSequence,
    prior,
    hyper: HyperParams,
    config: MHConfig,
    rng: np.random.Generator,
) -> ChainState:
    """Draw the chain's starting point.

    Labels: clamped to truth, uniform random, or per-observation argmax.
    theta_m: draws from Ga(kappa0, gamma0); kappa/gamma: the hyperprior
    medians carried by ``hyper``.  Consumes rng draws in this order:
    labels first (random mode only), then theta.
    """
    prior = as_simplex(prior)
    n, m = len(data), data.n_classes
    if config.clamp_labels:
        if data.labels is None:
            raise ValueError("clamp_labels requires a labeled dataset")
        labels = data.labels.copy()
    elif config.init_labels == "random":
        labels = rng.integers(0, m, size=n) + 1
    else:
        labels = np.argmax(data.observations, axis=1) + 1
    theta = rng.standard_gamma(hyper.kappa, size=m) * hyper.gamma
    state = ChainState(labels, theta, hyper.kappa, hyper.gamma, 0.0)
    state.log_posterior = log_joint(state, data, prior, hyper)
    return state


def run_chain(
    data: ObservationSequence,
    prior=None,
    config: MHConfig | None = None,
    hyper: HyperParams | None = None,
    chain_index: int = 0,
) -> ChainSummary:
    """Run one chain and summarize the retained draws.

    The RNG stream is derived from ``(config.seed, chain_index)``, so a
    fixed pair reproduces the chain exactly and distinct chain indices
    never share randomness.  Sweep t is retained when t >= burn_in and
    (t - burn_in) % thinning == 0.
    """
    config = config or MHConfig()
    hyper = hyper or HyperParams()
    n, m = len(data), data.n_classes
    if n < 1:
        raise ValueError("need at least one observation")
    prior = np.full(m, 1.0 / m) if prior is None else as_simplex(prior)
    if prior.shape[0] != m:
        raise ValueError("prior length does not match the data's class count")

    rng = child_rng(config.seed, DOMAIN_CHAIN, chain_index)
    state = initial_state(data, prior, hyper, config, rng)

    lo = np.log(np.vstack([clamp_simplex(row) for row in data.observations]))
    logp = np.log(prior)
    c = (state.labels - 1).astype(np.int64)
    theta = state.theta.astype(float).copy()
    scalars = np.array([state.kappa, state.gamma, state.log_posterior])
    counts = np.bincount(c, minlength=m).astype(float)
    s_sums = np.zeros(m)
    for i in range(n):
        s_sums[c[i]] += lo[i, c[i]]
    lg1 = np.array([math.lgamma(1.0 + t) for t in theta])
    lgm = np.array([math.lgamma(m + t) for t in theta])

    n_keep = (config.iterations - config.burn_in + config.thinning - 1) // config.thinning
    out_theta = np.empty((n_keep, m))
    out_kappa = np.empty(n_keep)
    out_gamma = np.empty(n_keep)
    out_logpost = np.empty(n_keep)
    proposed = np.zeros(4, dtype=np.int64)
    accepted = np.zeros(4, dtype=np.int64)

    sample_labels = not config.clamp_labels
    empty2 = np.zeros((0, 0))
    empty1 = np.zeros(0)
    start = 0
    while start < config.iterations:
        b = min(CHUNK_ITERATIONS, config.iterations - start)
        u_c = rng.random((b, n)) if sample_labels else empty2
        u_c_acc = rng.random((b, n)) if sample_labels else empty2
        z_t = rng.standard_normal((b, m))
        u_t_acc = rng.random((b, m))
        if config.sample_hyperparams:
            z_k = rng.standard_normal(b)
            u_k_acc = rng.random(b)
            z_g = rng.standard_normal(b)
            u_g_acc = rng.random(b)
        else:
            z_k = u_k_acc = z_g = u_g_acc = empty1
        t_global = start + np.arange(b)
        record_at = np.where(
            (t_global >= config.burn_in) & ((t_global - config.burn_in) % config.thinning == 0),
            (t_global - config.burn_in) // config.thinning,
            -1,
        ).astype(np.int64)
        _run_sweeps(
            c, theta, scalars, lo, logp, counts, s_sums, lg1, lgm,
            config.w_stay, config.proposal_std_theta, config.proposal_std_kappa,
            config.proposal_std_gamma, hyper.beta, hyper.eta, hyper.nu, hyper.omega,
            sample_labels, config.sample_hyperparams,
            u_c, u_c_acc, z_t, u_t_acc, z_k, u_k_acc, z_g, u_g_acc,
            record_at, out_theta, out_kappa, out_gamma, out_logpost,
            proposed, accepted,
        )
        start += b

    samples = {f"theta_{j + 1}": out_theta[:, j].copy() for j in range(m)}
    samples["kappa"] = out_kappa
    samples["gamma"] = out_gamma
    samples["log_posterior"] = out_logpost
    acceptance = {}
    for idx, block in enumerate(_BLOCKS):
        acceptance[block] = float(accepted[idx] / proposed[idx]) if proposed[idx] else float("nan")

    lo_q, hi_q = (1.0 - config.ci_level) / 2.0, 1.0 - (1.0 - config.ci_level) / 2.0
    medians, intervals = {}, {}
    for key, vals in samples.items():
        if key == "log_posterior":
            continue
        medians[key] = float(np.median(vals))
        intervals[key] = (float(np.quantile(vals, lo_q)), float(np.quantile(vals, hi_q)))

    return ChainSummary(
        samples=samples,
        medians=medians,
        intervals=intervals,
        acceptance=acceptance,
        config=config,
        hyper=hyper,
        prior=prior,
        n_observations=n,
        n_classes=m,
    )


def summarize_noise_posterior(summary: ChainSummary, method: str = "median") -> np.ndarray:
    """Component-wise point estimate of theta from a chain summary."""
    if summary.n_samples == 0:
        raise ValueError("chain summary holds no retained samples")
    mat = summary.theta_matrix()
    if method == "median":
        return np.median(mat, axis=0)
    if method == "mean":
        return mat.mean(axis=0)
    raise ValueError(f"unknown point-estimate method {method!r}")


def implied_theta_median(kappa: float, gamma: float) -> float:
    """Median noise level implied by a Ga(kappa, gamma) prior on theta."""
    return gamma_median(kappa, gamma)


def hyperprior_for_theta_median(
    target_median: float, beta: float = 2.0, eta: float = 2.0, nu: float = 2.0
) -> HyperParams:
    """Choose omega so the prior-median (kappa, gamma) imply a given theta median.

    With kappa and gamma anchored at their hyperprior medians, solves
    ``median(Ga(kappa0, gamma0)) == target_median`` for omega in closed
    form via the inverse regularized incomplete gamma function.
    """
    if target_median <= 0:
        raise ValueError("target_median must be > 0")
    kappa0 = gamma_median(beta, eta)
    gamma0 = target_median / gamma_median(kappa0, 1.0)
    omega = gamma0 / gamma_median(nu, 1.0)
    return HyperParams(beta=beta, eta=eta, nu=nu, omega=omega)


# ---------------------------------------------------------------------------
# Persistence
# ---------------------------------------------------------------------------


def write_chain_csv(path, summary: ChainSummary, meta: dict | None = None) -> None:
    """One row per retained sample: sample index, thetas, kappa, gamma, log_posterior."""
    m = summary.n_classes
    cols = [f"theta_{j}" for j in range(1, m + 1)] + ["kappa", "gamma", "log_posterior"]
    with open(path, "w", newline="") as fh:
        for key, value in (meta or {}).items():
            fh.write(f"# {key}={value}\n")
        fh.write(",".join(["sample"] + cols) + "\n")
        for s in range(summary.n_samples):
            row = [str(s)] + [repr(float(summary.samples[col][s])) for col in cols]
            fh.write(",".join(row) + "\n")


def summary_to_dict(summary: ChainSummary) -> dict:
    return {
        "medians": summary.medians,
        "intervals": {k: list(v) for k, v in summary.intervals.items()},
        "acceptance": summary.acceptance,
        "ci_level": summary.config.ci_level,
        "n_observations": summary.n_observations,
        "n_classes": summary.n_classes,
        "n_samples": summary.n_samples,
        "config": summary.config.to_dict(),
        "hyper": {
            "kappa": summary.hyper.kappa, "gamma": summary.hyper.gamma,
            "beta": summary.hyper.beta, "eta": summary.hyper.eta,
            "nu": summary.hyper.nu, "omega": summary.hyper.omega,
        },
        "prior": [float(p) for p in summary.prior],
    }


def write_summary_json(path, summary: ChainSummary, extra: dict | None = None) -> None:
    doc = summary_to_dict(summary)
    if extra:
        doc.update(extra)
    Path(path).write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n")


# ---------------------------------------------------------------------------
# Estimator front end
# ---------------------------------------------------------------------------


class NoiseInference(BaseEstimator):
    """Posterior noise-parameter inference as a scikit-learn estimator.

    ``fit(X, y)`` takes an (N, M) array of simplex rows and optional
    1-based labels, runs the sampler, and exposes the posterior point
    estimates as fitted attributes (``theta_``, ``kappa_``, ``gamma_``,
    ``summary_``).
    """

    def __init__(
        self,
        iterations: int = 50_000,
        burn_in: int = 10_000,
        thinning: int = 10,
        proposal_std_theta: float = 0.5,
        proposal_std_kappa: float = 0.5,
        proposal_std_gamma: float = 0.5,
        w_stay: float = 0.8,
        seed: int = 0,
        clamp_labels: bool = False,
        sample_hyperparams: bool = True,
        init_labels: str = "random",
        ci_level: float = 0.9,
        beta: float = 2.0,
        eta: float = 2.0,
        nu: float = 2.0,
        omega: float = 2.0,
        prior=None,
    ):
        self.iterations = iterations
        self.burn_in = burn_in
        self.thinning = thinning
        self.proposal_std_theta = proposal_std_theta
        self.proposal_std_kappa = proposal_std_kappa
        self.proposal_std_gamma = proposal_std_gamma
        self.w_stay = w_stay
        self.seed = seed
        self.clamp_labels = clamp_labels
        self.sample_hyperparams = sample_hyperparams
        self.init_labels = init_labels
        self.ci_level = ci_level
        self.beta = beta
        self.eta = eta
        self.nu = nu
        self.omega = omega
        self.prior = prior

    def _config(self) -> MHConfig:
        return MHConfig(
            iterations=self.iterations,
            burn_in=self.burn_in,
            thinning=self.thinning,
            proposal_std_theta=self.proposal_std_theta,
            proposal_std_kappa=self.proposal_std_kappa,
            proposal_std_gamma=self.proposal_std_gamma,
            w_stay=self.w_stay,
            seed=self.seed,
            clamp_labels=self.clamp_labels,
            sample_hyperparams=self.sample_hyperparams,
            init_labels=self.init_labels,
            ci_level=self.ci_level,
        )

    def fit(self, X, y=None):
        data = ObservationSequence(np.asarray(X, dtype=float), y)
        hyper = HyperParams(beta=self.beta, eta=self.eta, nu=self.nu, omega=self.omega)
        self.summary_ = run_chain(data, prior=self.prior, config=self._config(), hyper=hyper)
        self.theta_ = summarize_noise_posterior(self.summary_)
        self.kappa_ = self.summary_.medians["kappa"]
        self.gamma_ = self.summary_.medians["gamma"]
        self.acceptance_ = self.summary_.acceptance
        return self
