"""Benchmark harness: simulated experiments over files and configs.

Three experiment drivers plus the shared output plumbing:

* :func:`run_error_vs_n` scores every filter's argmax decision against
  the true class over a grid of history lengths, with the
  noise-weighted filter calibrated once on an independent labeled
  dataset (inference offline, filtering online).
* :func:`run_theta_recovery` repeats dataset generation + posterior
  inference and reports coverage/ordering statistics for the inferred
  noise levels.
* :func:`run_stream_filter` replays any recorded observation CSV
  through one filter and writes the posterior trace row by row.

Trials are embarrassingly parallel: each one derives its own RNG stream
from the experiment seed, so outputs are byte-identical across worker
counts.  Every output file embeds the tool version and a hash of the
generating config.
"""

from __future__ import annotations

import hashlib
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .core import HyperParams, ObservationSequence
from .filters import METHODS, HBNIFilter, make_filter
from .genmodel import (
    GenerativeConfig,
    generate_dataset,
    read_dataset_csv,
    resolve_theta,
    sample_class,
    sample_observations,
)
from .inference import (
    ChainSummary,
    MHConfig,
    run_chain,
    summarize_noise_posterior,
    write_chain_csv,
    write_summary_json,
)
from .rng import DOMAIN_CALIBRATION, DOMAIN_TRIAL, child_rng

Z_95 = 1.959963984540054


class ConfigError(Exception):
    """Invalid or inconsistent experiment configuration (CLI exit 2)."""


class DataError(Exception):
    """Malformed or missing input data (CLI exit 3)."""


def config_hash(doc: dict) -> str:
    """Stable 16-hex-digit digest of a JSON-serializable config."""
    canonical = json.dumps(doc, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()[:16]


def output_meta(cfg_hash: str) -> dict:
    return {"version": __version__, "config_hash": cfg_hash}


def _meta_lines(meta: dict) -> str:
    return "".join(f"# {k}={v}\n" for k, v in sorted(meta.items()))


def wilson_interval(errors: int, trials: int, z: float = Z_95) -> tuple[float, float]:
    """Wilson score interval for a binomial rate; contains the point estimate."""
    if trials <= 0:
        raise ValueError("trials must be > 0")
    p = errors / trials
    denom = 1.0 + z * z / trials
    center = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1.0 - p) / trials + z * z / (4 * trials * trials)) / denom
    # Wilson always contains the point estimate; enforce it against the
    # last-ulp rounding of center +/- half at the boundaries.
    return min(p, max(0.0, center - half)), max(p, min(1.0, center + half))


# ---------------------------------------------------------------------------
# Error vs history length
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ErrorCurvePoint:
    method: str
    n: int
    trials: int
    errors: int
    rate: float
    ci_lo: float
    ci_hi: float


@dataclass
class ErrorCurveResult:
    points: list
    correct: dict  # method -> (trials, len(n_grid)) bool array
    n_grid: list
    true_classes: np.ndarray
    theta_calibrated: np.ndarray
    calibration_summary: ChainSummary

    def point(self, method: str, n: int) -> ErrorCurvePoint:
        for p in self.points:
            if p.method == method and p.n == n:
                return p
        raise KeyError(f"no point for {method!r} at N={n}")


def calibrate_noise(
    gen: GenerativeConfig,
    per_class: int,
    mh: MHConfig,
    hyper: HyperParams,
    seed: int,
) -> tuple[np.ndarray, ChainSummary]:
    """Infer noise levels from an independent labeled calibration set.

    The calibration stream is separate from every test-trial stream, and
    labels are known here, so the sampler runs with labels clamped.
    """
    rng = child_rng(seed, DOMAIN_CALIBRATION, 0)
    data = generate_dataset(gen, per_class=per_class, rng=rng)
    cfg = MHConfig(**{**mh.to_dict(), "clamp_labels": True})
    summary = run_chain(data, prior=gen.prior, config=cfg, hyper=hyper)
    return summarize_noise_posterior(summary), summary


def run_error_vs_n(
    gen: GenerativeConfig,
    n_grid,
    trials: int,
    methods=METHODS,
    calibration_per_class: int = 5,
    mh: MHConfig | None = None,
    hyper: HyperParams | None = None,
    seed: int | None = None,
    threads: int = 1,
) -> ErrorCurveResult:
    """Misclassification rate per (method, N) over seeded Monte Carlo trials.

    Each trial draws a true class from the prior and a stream of
    ``max(n_grid)`` observations from its own RNG stream; every method
    is scored on each prefix length in the grid (argmax vs truth, 0/1
    loss).  The noise-weighted filter uses the point estimate from
    :func:`calibrate_noise`, never the test trials.
    """
    n_grid = sorted(int(n) for n in n_grid)
    if not n_grid or n_grid[0] < 1:
        raise ValueError("n_grid must be non-empty with entries >= 1")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    unknown = [m for m in methods if m not in METHODS]
    if unknown:
        raise ValueError(f"unknown methods {unknown}; expected a subset of {METHODS}")
    seed = gen.seed if seed is None else int(seed)
    mh = mh or MHConfig(seed=seed)
    hyper = hyper or HyperParams()
    n_max = n_grid[-1]
    grid_idx = np.array(n_grid) - 1

    theta_hat, calib_summary = calibrate_noise(gen, calibration_per_class, mh, hyper, seed)
    filters = {m: make_filter(m, prior=gen.prior, theta=theta_hat) for m in methods}

    true_classes = np.zeros(trials, dtype=np.int64)
    correct = {m: np.zeros((trials, len(n_grid)), dtype=bool) for m in methods}

    def run_trial(t: int) -> None:
        rng = child_rng(seed, DOMAIN_TRIAL, t)
        theta_true = resolve_theta(gen, rng)
        c = sample_class(gen.prior, rng)
        obs = sample_observations(c, theta_true, n_max, rng)
        true_classes[t] = c
        for m in methods:
            trace = filters[m].posterior_trace(obs)
            decisions = np.argmax(trace, axis=1) + 1
            correct[m][t] = decisions[grid_idx] == c

    if threads > 1:
        chunks = np.array_split(np.arange(trials), threads * 4)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(lambda idx: [run_trial(int(t)) for t in idx], chunks))
    else:
        for t in range(trials):
            run_trial(t)

    points = []
    for m in methods:
        for j, n in enumerate(n_grid):
            errors = int(trials - correct[m][:, j].sum())
            lo, hi = wilson_interval(errors, trials)
            points.append(ErrorCurvePoint(m, n, trials, errors, errors / trials, lo, hi))
    return ErrorCurveResult(
        points=points,
        correct=correct,
        n_grid=n_grid,
        true_classes=true_classes,
        theta_calibrated=theta_hat,
        calibration_summary=calib_summary,
    )


def write_error_curve_long_csv(path, result: ErrorCurveResult, meta: dict) -> None:
    """Long form: one row per (method, N, trial)."""
    with open(path, "w", newline="") as fh:
        fh.write(_meta_lines(meta))
        fh.write("method,N,trial,correct\n")
        for m in result.correct:
            mat = result.correct[m]
            for j, n in enumerate(result.n_grid):
                col = mat[:, j]
                for t in range(mat.shape[0]):
                    fh.write(f"{m},{n},{t},{int(col[t])}\n")


def write_error_curve_aggregate_csv(path, result: ErrorCurveResult, meta: dict) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(_meta_lines(meta))
        fh.write("method,N,trials,errors,rate,ci_lo,ci_hi\n")
        for p in result.points:
            fh.write(
                f"{p.method},{p.n},{p.trials},{p.errors},{p.rate!r},{p.ci_lo!r},{p.ci_hi!r}\n"
            )


# ---------------------------------------------------------------------------
# Noise-parameter recovery
# ---------------------------------------------------------------------------


@dataclass
class ThetaRecoveryResult:
    summaries: list
    medians: np.ndarray  # (repetitions, M)
    coverage: np.ndarray | None  # per-class fraction of runs whose CI covers truth
    ordering_rate: float | None  # fraction of runs recovering the true ordering
    joint_coverage: float | None  # fraction of runs where every CI covers its truth
    report: dict


def run_theta_recovery(
    gen: GenerativeConfig,
    per_class: int,
    mh: MHConfig | None = None,
    hyper: HyperParams | None = None,
    repetitions: int = 1,
    threads: int = 1,
    histogram_bins: int = 40,
    vary_data: bool = False,
) -> ThetaRecoveryResult:
    """Repeated noise-recovery runs with coverage/ordering statistics.

    By default every repetition runs an independently seeded chain on
    the same dataset (stream 0 of the generative config), measuring
    sampler stability; ``vary_data=True`` instead draws a fresh dataset
    per repetition, measuring how inference fares across data
    realizations.  Repetition r always uses chain index r.  Coverage and
    ordering statistics require the config to carry fixed true noise
    levels.
    """
    if gen.n_classes < 2:
        raise ValueError("need at least 2 classes")
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    mh = mh or MHConfig(seed=gen.seed)
    hyper = hyper or HyperParams()
    m = gen.n_classes

    summaries: list[ChainSummary | None] = [None] * repetitions

    def run_rep(r: int) -> None:
        data = generate_dataset(gen, per_class=per_class, stream_index=r if vary_data else 0)
        summaries[r] = run_chain(data, prior=gen.prior, config=mh, hyper=hyper, chain_index=r)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(run_rep, range(repetitions)))
    else:
        for r in range(repetitions):
            run_rep(r)

    medians = np.array([[s.medians[f"theta_{j + 1}"] for j in range(m)] for s in summaries])
    coverage = None
    ordering_rate = None
    joint_coverage = None
    if gen.theta is not None:
        covered = np.zeros((repetitions, m))
        for r, s in enumerate(summaries):
            for j in range(m):
                lo, hi = s.intervals[f"theta_{j + 1}"]
                covered[r, j] = lo <= gen.theta[j] <= hi
        coverage = covered.mean(axis=0)
        joint_coverage = float(covered.all(axis=1).mean())
        true_order = np.argsort(gen.theta, kind="stable")
        ordering_rate = float(
            np.mean([np.array_equal(np.argsort(row, kind="stable"), true_order) for row in medians])
        )

    hist = {}
    first = summaries[0]
    for j in range(m):
        vals = first.samples[f"theta_{j + 1}"]
        counts, edges = np.histogram(vals, bins=histogram_bins)
        hist[f"theta_{j + 1}"] = {
            "counts": counts.tolist(),
            "edges": [float(e) for e in edges],
        }

    report = {
        "repetitions": repetitions,
        "vary_data": vary_data,
        "per_class": per_class,
        "n_classes": m,
        "theta_true": None if gen.theta is None else [float(t) for t in gen.theta],
        "medians": medians.tolist(),
        "coverage": None if coverage is None else coverage.tolist(),
        "joint_coverage": joint_coverage,
        "ordering_rate": ordering_rate,
        "ci_level": mh.ci_level,
        "acceptance_first_run": first.acceptance,
        "posterior_histograms": hist,
    }
    return ThetaRecoveryResult(
        summaries=summaries,
        medians=medians,
        coverage=coverage,
        ordering_rate=ordering_rate,
        joint_coverage=joint_coverage,
        report=report,
    )


# ---------------------------------------------------------------------------
# Stream replay
# ---------------------------------------------------------------------------


def load_stream(path) -> ObservationSequence:
    try:
        return read_dataset_csv(path)
    except FileNotFoundError as exc:
        raise DataError(f"stream file not found: {path}") from exc
    except ValueError as exc:
        raise DataError(f"{path}: {exc}") from exc


def run_stream_filter(
    data: ObservationSequence,
    method: str,
    prior=None,
    theta=None,
    mode: str = "median",
    theta_samples=None,
    noise_updates=None,
) -> np.ndarray:
    """Posterior trace over a recorded stream, one row per input row.

    ``noise_updates`` is an optional list of ``(step, theta)`` pairs for
    the noise-weighted filter: before consuming the observation at that
    1-based step, the filter's concentrations are swapped in place
    (accumulated evidence is kept).
    """
    n = len(data)
    if n or (prior is None and theta is None and theta_samples is None):
        m = data.n_classes
    elif prior is not None:
        m = len(prior)
    elif theta is not None:
        m = len(np.atleast_1d(theta))
    else:
        m = np.atleast_2d(theta_samples).shape[1]
    filt = make_filter(method, prior=prior, theta=theta, mode=mode, theta_samples=theta_samples)
    filt.reset(m)
    updates = {}
    for step, new_theta in noise_updates or []:
        if int(step) < 1:
            raise ValueError("noise update steps are 1-based")
        updates[int(step)] = new_theta
    if updates and not isinstance(filt, HBNIFilter):
        raise ValueError("noise updates only apply to the hbni method")
    trace = np.zeros((n, filt.n_classes_))
    for i in range(n):
        if (i + 1) in updates:
            filt.set_noise(updates[i + 1])
        filt.update(data.observations[i])
        trace[i] = filt.predict_proba()
    return trace


def write_trace_csv(path, trace: np.ndarray, meta: dict) -> None:
    m = trace.shape[1] if trace.size else 0
    with open(path, "w", newline="") as fh:
        fh.write(_meta_lines(meta))
        if m == 0:
            fh.write("step\n")
            return
        cols = ",".join(f"p_{j}" for j in range(1, m + 1))
        fh.write(f"step,{cols},argmax\n")
        for i in range(trace.shape[0]):
            probs = ",".join(repr(float(v)) for v in trace[i])
            fh.write(f"{i + 1},{probs},{int(np.argmax(trace[i])) + 1}\n")


def write_theta_recovery_outputs(out_dir: Path, result: ThetaRecoveryResult, meta: dict) -> None:
    out_dir = Path(out_dir)
    report = dict(result.report)
    report.update(output_meta(meta["config_hash"]))
    (out_dir / "recovery_report.json").write_text(
        json.dumps(report, sort_keys=True, indent=2) + "\n"
    )
    write_chain_csv(out_dir / "chain_rep0.csv", result.summaries[0], meta)
    write_summary_json(out_dir / "summary_rep0.json", result.summaries[0],
                       extra=output_meta(meta["config_hash"]))
