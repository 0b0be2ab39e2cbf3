"""Durative macro-observations: filter a stream until confident, then emit.

A macro-observation consumes low-level classifier outputs one at a time
and terminates at the first read-out whose top posterior mass reaches
the confidence threshold, or at a hard cap.  Monte Carlo estimation
over the generative model tabulates the two distributions a
decision-theoretic planner samples: the semantic output distribution
(a confusion row per true class) and the per-true-class distribution of
the consumed-observation count tau.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .filters import ClassPosterior, SequentialFilter
from .genmodel import GenerativeConfig, resolve_theta, sample_observation
from .rng import DOMAIN_MACRO, child_rng

STATUS_THRESHOLD = "threshold"
STATUS_CAP = "cap"
STATUS_EXHAUSTED = "exhausted"


@dataclass(frozen=True)
class MacroObservation:
    """Semantic label with its confidence and consumed-observation count."""

    label: int
    confidence: float
    tau: int
    posterior: ClassPosterior
    status: str

    @property
    def timed_out(self) -> bool:
        return self.status != STATUS_THRESHOLD


@dataclass
class MacroObsModel:
    """Sampled macro-observation distributions, one row per true class.

    ``label_counts[m-1, k-1]`` counts runs with true class m emitting
    label k; ``tau_counts[m-1, t-1]`` counts runs that consumed t
    observations (bin width 1, t in [1, cap]).  Cap hits are included in
    both tables (labeled by the final argmax) and tallied separately in
    ``timeout_counts``.  ``joint_counts`` optionally keeps the full
    (label, tau) table per class for correlated sampling.
    """

    n_classes: int
    threshold: float
    cap: int
    label_counts: np.ndarray
    tau_counts: np.ndarray
    timeout_counts: np.ndarray
    config_hash: str = ""
    joint_counts: np.ndarray | None = None

    def __post_init__(self):
        self.label_counts = np.asarray(self.label_counts, dtype=np.int64)
        self.tau_counts = np.asarray(self.tau_counts, dtype=np.int64)
        self.timeout_counts = np.asarray(self.timeout_counts, dtype=np.int64)
        m, cap = self.n_classes, self.cap
        if self.label_counts.shape != (m, m):
            raise ValueError("label_counts must be (M, M)")
        if self.tau_counts.shape != (m, cap):
            raise ValueError("tau_counts must be (M, cap)")
        if self.timeout_counts.shape != (m,):
            raise ValueError("timeout_counts must be (M,)")
        if self.joint_counts is not None:
            self.joint_counts = np.asarray(self.joint_counts, dtype=np.int64)
            if self.joint_counts.shape != (m, m, cap):
                raise ValueError("joint_counts must be (M, M, cap)")
        if not np.array_equal(self.label_counts.sum(axis=1), self.tau_counts.sum(axis=1)):
            raise ValueError("label and tau histograms disagree on per-class trial counts")

    @property
    def trials_per_class(self) -> np.ndarray:
        return self.label_counts.sum(axis=1)

    def confusion_matrix(self) -> np.ndarray:
        """P(emitted label | true class) rows; valid simplex rows."""
        totals = self.trials_per_class
        if np.any(totals == 0):
            raise ValueError("confusion matrix undefined for classes with zero trials")
        return self.label_counts / totals[:, None]

    def tau_distribution(self, true_class: int) -> np.ndarray:
        counts = self.tau_counts[true_class - 1]
        total = counts.sum()
        if total == 0:
            raise ValueError(f"no trials recorded for class {true_class}")
        return counts / total

    def mean_tau(self, true_class: int) -> float:
        dist = self.tau_distribution(true_class)
        return float(np.arange(1, self.cap + 1) @ dist)

    # -- serialization ------------------------------------------------------

    def to_dict(self) -> dict:
        doc = {
            "n_classes": self.n_classes,
            "threshold": self.threshold,
            "cap": self.cap,
            "label_counts": self.label_counts.tolist(),
            "tau_counts": self.tau_counts.tolist(),
            "timeout_counts": self.timeout_counts.tolist(),
            "config_hash": self.config_hash,
        }
        if self.joint_counts is not None:
            doc["joint_counts"] = self.joint_counts.tolist()
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "MacroObsModel":
        return cls(
            n_classes=int(doc["n_classes"]),
            threshold=float(doc["threshold"]),
            cap=int(doc["cap"]),
            label_counts=doc["label_counts"],
            tau_counts=doc["tau_counts"],
            timeout_counts=doc["timeout_counts"],
            config_hash=doc.get("config_hash", ""),
            joint_counts=doc.get("joint_counts"),
        )

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n")

    @classmethod
    def load(cls, path) -> "MacroObsModel":
        return cls.from_dict(json.loads(Path(path).read_text()))


def run_macro_observation(
    stream,
    filt: SequentialFilter,
    threshold: float,
    cap: int,
) -> MacroObservation:
    """Consume ``stream`` through ``filt`` until confident or capped.

    ``filt`` is used as-is (callers reset it, or prime it deliberately).
    A stream that ends before both the threshold and the cap yields a
    distinct ``exhausted`` status.
    """
    if cap < 1:
        raise ValueError("cap must be >= 1")
    tau = 0
    for o in stream:
        filt.update(o)
        tau += 1
        post = filt.predict_proba()
        if float(np.max(post)) >= threshold:
            return MacroObservation(
                label=int(np.argmax(post)) + 1,
                confidence=float(np.max(post)),
                tau=tau,
                posterior=ClassPosterior(post, filt.n_observations_),
                status=STATUS_THRESHOLD,
            )
        if tau >= cap:
            return MacroObservation(
                label=int(np.argmax(post)) + 1,
                confidence=float(np.max(post)),
                tau=tau,
                posterior=ClassPosterior(post, filt.n_observations_),
                status=STATUS_CAP,
            )
    post = filt.predict_proba()
    return MacroObservation(
        label=int(np.argmax(post)) + 1,
        confidence=float(np.max(post)),
        tau=tau,
        posterior=ClassPosterior(post, filt.n_observations_),
        status=STATUS_EXHAUSTED,
    )


def _check_threshold(threshold: float, n_classes: int) -> float:
    if not 1.0 / n_classes < threshold < 1.0:
        raise ValueError(f"threshold must lie in (1/M, 1), got {threshold}")
    return float(threshold)


def _endless_stream(true_class: int, theta: np.ndarray, rng: np.random.Generator):
    while True:
        yield sample_observation(true_class, theta, rng)


def estimate_model(
    config: GenerativeConfig,
    filter_factory,
    threshold: float,
    cap: int,
    trials: int,
    config_hash: str = "",
    keep_joint: bool = False,
    threads: int = 1,
) -> MacroObsModel:
    """Monte Carlo estimate of the macro-observation distributions.

    For every true class, runs ``trials`` independent macro-observations
    on freshly generated streams.  ``filter_factory()`` must return a
    fresh filter instance; each (class, trial) pair draws from its own
    child RNG stream of ``config.seed``, so estimates are reproducible
    regardless of worker count or execution order.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    m = config.n_classes
    threshold = _check_threshold(threshold, m)
    if cap < 1:
        raise ValueError("cap must be >= 1")

    def run_block(pairs) -> tuple:
        label_counts = np.zeros((m, m), dtype=np.int64)
        tau_counts = np.zeros((m, cap), dtype=np.int64)
        timeout_counts = np.zeros(m, dtype=np.int64)
        joint = np.zeros((m, m, cap), dtype=np.int64) if keep_joint else None
        for true_class, trial in pairs:
            rng = child_rng(config.seed, DOMAIN_MACRO, true_class, trial)
            theta_true = resolve_theta(config, rng)
            filt = filter_factory()
            filt.reset(m)
            result = run_macro_observation(
                _endless_stream(true_class, theta_true, rng), filt, threshold, cap
            )
            label_counts[true_class - 1, result.label - 1] += 1
            tau_counts[true_class - 1, result.tau - 1] += 1
            if result.timed_out:
                timeout_counts[true_class - 1] += 1
            if joint is not None:
                joint[true_class - 1, result.label - 1, result.tau - 1] += 1
        return label_counts, tau_counts, timeout_counts, joint

    pairs = [(c, t) for c in range(1, m + 1) for t in range(trials)]
    if threads > 1:
        blocks = [list(b) for b in np.array_split(np.array(pairs), threads * 2) if len(b)]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run_block, blocks))
    else:
        results = [run_block(pairs)]

    label_counts = sum(r[0] for r in results)
    tau_counts = sum(r[1] for r in results)
    timeout_counts = sum(r[2] for r in results)
    joint = sum(r[3] for r in results) if keep_joint else None

    return MacroObsModel(
        n_classes=m,
        threshold=threshold,
        cap=cap,
        label_counts=label_counts,
        tau_counts=tau_counts,
        timeout_counts=timeout_counts,
        config_hash=config_hash,
        joint_counts=joint,
    )


def sample_macro_observation(
    model: MacroObsModel,
    true_class: int,
    rng: np.random.Generator,
    joint: bool = False,
) -> tuple[int, int]:
    """Draw one (label, tau) pair for a given true class.

    Label and tau are sampled independently from their marginal tables
    unless ``joint=True``, which requires the model to carry the joint
    histogram.
    """
    if not 1 <= true_class <= model.n_classes:
        raise ValueError(f"true_class {true_class} outside [1, {model.n_classes}]")
    row = true_class - 1
    if joint:
        if model.joint_counts is None:
            raise ValueError("model was estimated without the joint histogram")
        counts = model.joint_counts[row].reshape(-1)
        total = counts.sum()
        if total == 0:
            raise ValueError(f"no trials recorded for class {true_class}")
        flat = int(rng.choice(counts.shape[0], p=counts / total))
        return flat // model.cap + 1, flat % model.cap + 1
    labels = model.label_counts[row]
    taus = model.tau_counts[row]
    total = labels.sum()
    if total == 0:
        raise ValueError(f"no trials recorded for class {true_class}")
    label = int(rng.choice(model.n_classes, p=labels / total)) + 1
    tau = int(rng.choice(model.cap, p=taus / taus.sum())) + 1
    return label, tau
