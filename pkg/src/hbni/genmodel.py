"""Generative sampling from the hierarchical noise model.

The model: a class label is drawn from a categorical prior, a noise
level theta_m from a shared Ga(kappa, gamma) prior (hierarchical mode)
or taken as fixed truth, and each observation from
``Dir(theta_c * 1_c + 1)``.  Dirichlet draws use the normalized-gamma
construction, which is exact for every theta >= 0 including theta = 0.

Also provides the dataset CSV/JSON interchange formats used by the
benchmark CLI (header ``class,o_1,...,o_M``; unlabeled rows leave the
class field empty).
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import HyperParams, ObservationSequence, as_noise_params, as_simplex, check_class_label
from .rng import DOMAIN_DATASET, child_rng


@dataclass(frozen=True)
class GenerativeConfig:
    """Configuration for the generative observation model.

    Exactly one of ``theta`` (fixed-truth mode) or ``hyper``
    (hierarchical mode, theta_m ~ Ga(kappa, gamma)) must be given.
    ``seed`` fully determines every sample drawn under the config.
    """

    n_classes: int
    prior: np.ndarray | None = None
    theta: np.ndarray | None = None
    hyper: HyperParams | None = None
    seed: int = 0

    def __post_init__(self):
        if self.n_classes < 2:
            raise ValueError(f"need at least 2 classes, got M={self.n_classes}")
        if (self.theta is None) == (self.hyper is None):
            raise ValueError("exactly one of theta (fixed-truth) or hyper (hierarchical) must be set")
        prior = np.full(self.n_classes, 1.0 / self.n_classes) if self.prior is None else as_simplex(self.prior)
        if prior.shape[0] != self.n_classes:
            raise ValueError("prior length does not match n_classes")
        object.__setattr__(self, "prior", prior)
        if self.theta is not None:
            object.__setattr__(self, "theta", as_noise_params(self.theta, self.n_classes))

    def to_dict(self) -> dict:
        d = {
            "n_classes": self.n_classes,
            "prior": [float(p) for p in self.prior],
            "seed": int(self.seed),
        }
        if self.theta is not None:
            d["theta"] = [float(t) for t in self.theta]
        if self.hyper is not None:
            h = self.hyper
            d["hyper"] = {
                "kappa": h.kappa, "gamma": h.gamma,
                "beta": h.beta, "eta": h.eta, "nu": h.nu, "omega": h.omega,
            }
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "GenerativeConfig":
        hyper = HyperParams(**d["hyper"]) if "hyper" in d else None
        return cls(
            n_classes=int(d["n_classes"]),
            prior=d.get("prior"),
            theta=d.get("theta"),
            hyper=hyper,
            seed=int(d.get("seed", 0)),
        )


def sample_class(prior, rng: np.random.Generator) -> int:
    """Draw a 1-based class label from the categorical prior."""
    p = as_simplex(prior)
    return int(rng.choice(p.shape[0], p=p)) + 1


def sample_theta(hyper: HyperParams, rng: np.random.Generator) -> float:
    """Draw one noise level from the shared Ga(kappa, scale=gamma) prior."""
    return float(rng.standard_gamma(hyper.kappa) * hyper.gamma)


def sample_observation(c: int, theta, rng: np.random.Generator, n_classes: int | None = None) -> np.ndarray:
    """Draw one simplex observation from ``Dir(theta_c * 1_c + 1)``.

    Implemented as M independent gamma draws normalized to unit sum.
    """
    t = as_noise_params(theta, n_classes)
    m = t.shape[0]
    c = check_class_label(c, m)
    alpha = np.ones(m)
    alpha[c - 1] += t[c - 1]
    g = rng.standard_gamma(alpha)
    return g / g.sum()


def sample_observations(c: int, theta, size: int, rng: np.random.Generator) -> np.ndarray:
    """Vectorized form of :func:`sample_observation`: (size, M) array."""
    t = as_noise_params(theta)
    m = t.shape[0]
    c = check_class_label(c, m)
    alpha = np.ones(m)
    alpha[c - 1] += t[c - 1]
    g = rng.standard_gamma(np.broadcast_to(alpha, (size, m)))
    return g / g.sum(axis=1, keepdims=True)


def resolve_theta(config: GenerativeConfig, rng: np.random.Generator) -> np.ndarray:
    """Fixed truth, or one hierarchical draw of all theta_m."""
    if config.theta is not None:
        return config.theta.copy()
    return np.array([sample_theta(config.hyper, rng) for _ in range(config.n_classes)])


def generate_dataset(
    config: GenerativeConfig,
    n: int | None = None,
    per_class: int | None = None,
    stream_index: int = 0,
    rng: np.random.Generator | None = None,
) -> ObservationSequence:
    """Draw a labeled dataset from the generative model.

    With ``per_class`` set, labels are stratified class-major
    (``per_class`` observations of class 1, then class 2, ...) and ``n``,
    if also given, must equal ``M * per_class``.  Otherwise labels are
    drawn from the prior, interleaved with their observations.

    ``stream_index`` selects an independent child stream of the config
    seed, so repeated datasets under one config never share randomness.
    An explicit ``rng`` overrides the seed/stream pair entirely.
    """
    if rng is None:
        rng = child_rng(config.seed, DOMAIN_DATASET, stream_index)
    m = config.n_classes
    if per_class is not None:
        if per_class < 0:
            raise ValueError("per_class must be >= 0")
        if n is not None and n != m * per_class:
            raise ValueError(f"n={n} inconsistent with M*per_class={m * per_class}")
        labels = np.repeat(np.arange(1, m + 1), per_class)
    else:
        if n is None or n < 0:
            raise ValueError("need n >= 0 when per_class is not given")
        labels = np.empty(n, dtype=int)
    theta = resolve_theta(config, rng)
    n_total = labels.shape[0]
    obs = np.empty((n_total, m))
    for i in range(n_total):
        if per_class is None:
            labels[i] = sample_class(config.prior, rng)
        obs[i] = sample_observation(int(labels[i]), theta, rng)
    return ObservationSequence(obs, labels)


# ---------------------------------------------------------------------------
# Dataset interchange formats
# ---------------------------------------------------------------------------


def write_dataset_csv(path, data: ObservationSequence, meta: dict | None = None) -> None:
    """Write ``class,o_1,...,o_M`` rows; metadata goes in '#' comment lines."""
    m = data.n_classes
    with open(path, "w", newline="") as fh:
        for key, value in (meta or {}).items():
            fh.write(f"# {key}={value}\n")
        writer = csv.writer(fh)
        writer.writerow(["class"] + [f"o_{j}" for j in range(1, m + 1)])
        for i in range(len(data)):
            label = "" if data.labels is None else str(int(data.labels[i]))
            writer.writerow([label] + [repr(float(v)) for v in data.observations[i]])


def read_dataset_csv(path) -> ObservationSequence:
    """Parse a dataset CSV; raises ValueError naming the offending row."""
    rows: list[list[float]] = []
    labels: list[int | None] = []
    with open(path, newline="") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    reader = csv.reader(lines)
    header = next(reader, None)
    if header is None:
        return ObservationSequence(np.empty((0, 2)))
    if header[0] != "class" or len(header) < 3:
        raise ValueError(f"bad dataset header {header!r}, expected class,o_1,...,o_M")
    m = len(header) - 1
    for idx, row in enumerate(reader):
        if not row:
            continue
        if len(row) != m + 1:
            raise ValueError(f"row {idx + 1}: expected {m + 1} fields, got {len(row)}")
        try:
            labels.append(int(row[0]) if row[0] != "" else None)
            rows.append([float(v) for v in row[1:]])
        except ValueError as exc:
            raise ValueError(f"row {idx + 1}: {exc}") from None
    if not rows:
        return ObservationSequence(np.empty((0, m)))
    have_labels = all(l is not None for l in labels)
    if not have_labels and any(l is not None for l in labels):
        raise ValueError("dataset mixes labeled and unlabeled rows")
    return ObservationSequence(
        np.asarray(rows, dtype=float),
        np.asarray(labels, dtype=int) if have_labels else None,
    )


def write_dataset_json(path, data: ObservationSequence, config: GenerativeConfig | None = None,
                       extra: dict | None = None) -> None:
    """JSON dataset with embedded config and seed for provenance."""
    doc: dict = {
        "observations": [[float(v) for v in row] for row in data.observations],
        "labels": None if data.labels is None else [int(c) for c in data.labels],
    }
    if config is not None:
        doc["config"] = config.to_dict()
    if extra:
        doc.update(extra)
    Path(path).write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n")


def read_dataset_json(path) -> tuple[ObservationSequence, GenerativeConfig | None]:
    doc = json.loads(Path(path).read_text())
    obs = np.asarray(doc["observations"], dtype=float)
    if obs.size == 0:
        obs = obs.reshape(0, 2)
    labels = doc.get("labels")
    data = ObservationSequence(obs, None if labels is None else np.asarray(labels, dtype=int))
    config = GenerativeConfig.from_dict(doc["config"]) if "config" in doc else None
    return data, config
