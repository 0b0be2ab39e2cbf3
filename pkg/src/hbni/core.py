"""Domain types, simplex validation helpers, and log-density primitives.

Everything here is a pure function of its inputs; no global state is
touched, so all operations are safe under concurrent callers.

Conventions used throughout the package:

* Class labels are 1-based at every public interface.
* Gamma distributions are parameterized by (shape, scale): the density
  kernel is ``(shape - 1)*log(x) - x/scale``.
* Probability vectors ("simplex vectors") are numpy float arrays of
  length M >= 2 whose entries are >= 0 and sum to 1 within SIMPLEX_ATOL.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaincinv, gammaln

# Tolerance for the sum-to-one invariant after normalization.
SIMPLEX_ATOL = 1e-9
# Reject vectors whose pre-normalization mass is below this.
MIN_SIMPLEX_MASS = 1e-12
# Floor applied to probability components before density evaluation, so
# saturated upstream classifiers (exact 0/1 outputs) cannot produce -inf
# log-likelihoods.
CLAMP_EPS = 1e-9


def as_simplex(vec) -> np.ndarray:
    """Validate and normalize a probability vector.

    Returns a fresh float64 array on the (M-1)-simplex. Raises
    ``ValueError`` for negative entries, non-finite entries, M < 2, or
    total mass below ``MIN_SIMPLEX_MASS``. Normalization is idempotent:
    ``as_simplex(as_simplex(x))`` equals ``as_simplex(x)`` exactly.
    """
    p = np.asarray(vec, dtype=float)
    if p.ndim != 1:
        raise ValueError(f"expected a 1-d probability vector, got shape {p.shape}")
    if p.shape[0] < 2:
        raise ValueError(f"simplex vectors need at least 2 classes, got M={p.shape[0]}")
    if not np.all(np.isfinite(p)):
        raise ValueError("probability vector has non-finite entries")
    if np.any(p < 0):
        raise ValueError("probability vector has negative entries")
    total = p.sum()
    if total < MIN_SIMPLEX_MASS:
        raise ValueError(f"probability mass {total!r} is below {MIN_SIMPLEX_MASS}")
    if abs(total - 1.0) <= SIMPLEX_ATOL:
        # Already normalized; re-dividing would break idempotence.
        return p.copy()
    return p / total


def as_simplex_rows(mat) -> np.ndarray:
    """Validate/normalize a 2-d array whose rows are simplex vectors."""
    x = np.asarray(mat, dtype=float)
    if x.ndim != 2:
        raise ValueError(f"expected a 2-d array of probability rows, got shape {x.shape}")
    return np.vstack([as_simplex(row) for row in x]) if x.shape[0] else x.reshape(0, x.shape[1])


def clamp_simplex(vec, eps: float = CLAMP_EPS) -> np.ndarray:
    """Floor every component at ``eps`` and renormalize.

    Density evaluations apply this to incoming classifier outputs so
    that exactly-zero components never produce -inf log-likelihoods.
    """
    p = as_simplex(vec)
    return as_simplex(np.maximum(p, eps))


def check_class_label(c: int, n_classes: int) -> int:
    """Validate a 1-based class label against the configured M."""
    c = int(c)
    if not 1 <= c <= n_classes:
        raise ValueError(f"class label {c} outside [1, {n_classes}]")
    return c


def as_noise_params(theta, n_classes: int | None = None) -> np.ndarray:
    """Validate per-class concentration parameters (theta_m >= 0, finite)."""
    t = np.asarray(theta, dtype=float)
    if t.ndim != 1:
        raise ValueError(f"noise parameters must be 1-d, got shape {t.shape}")
    if n_classes is not None and t.shape[0] != n_classes:
        raise ValueError(f"expected {n_classes} noise parameters, got {t.shape[0]}")
    if not np.all(np.isfinite(t)):
        raise ValueError("noise parameters must be finite")
    if np.any(t < 0):
        raise ValueError("noise parameters must be >= 0")
    return t.copy()


def gamma_median(shape: float, scale: float) -> float:
    """Median of a Ga(shape, scale) distribution."""
    if shape <= 0 or scale <= 0:
        raise ValueError("shape and scale must be > 0")
    return float(gammaincinv(shape, 0.5) * scale)


@dataclass(frozen=True)
class HyperParams:
    """Shared gamma-prior parameters for the per-class noise levels.

    ``kappa`` (shape) and ``gamma`` (scale) describe the Ga(kappa, gamma)
    prior on each theta_m.  ``beta``/``eta`` and ``nu``/``omega`` are the
    fixed shape/scale constants of the gamma hyperpriors placed on kappa
    and gamma themselves.  Leaving ``kappa`` or ``gamma`` unset anchors
    it at the median of its own hyperprior, which is also how posterior
    inference initializes the pair.
    """

    kappa: float | None = None
    gamma: float | None = None
    beta: float = 2.0
    eta: float = 2.0
    nu: float = 2.0
    omega: float = 2.0

    def __post_init__(self):
        for name in ("beta", "eta", "nu", "omega"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be finite and > 0, got {v!r}")
        if self.kappa is None:
            object.__setattr__(self, "kappa", gamma_median(self.beta, self.eta))
        if self.gamma is None:
            object.__setattr__(self, "gamma", gamma_median(self.nu, self.omega))
        for name in ("kappa", "gamma"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be finite and > 0, got {v!r}")


@dataclass
class ObservationSequence:
    """An ordered stream of classifier probability outputs.

    ``observations`` is an (N, M) array of simplex rows; ``labels`` is an
    optional array of 1-based true classes for benchmark use.
    """

    observations: np.ndarray
    labels: np.ndarray | None = None

    def __post_init__(self):
        obs = np.asarray(self.observations, dtype=float)
        if obs.size == 0:
            m = obs.shape[1] if obs.ndim == 2 else 2
            obs = obs.reshape(0, m)
        self.observations = as_simplex_rows(obs) if obs.shape[0] else obs
        if self.labels is not None:
            lab = np.asarray(self.labels, dtype=int)
            if lab.shape != (self.observations.shape[0],):
                raise ValueError("labels must have one entry per observation")
            for c in lab:
                check_class_label(c, self.n_classes)
            self.labels = lab

    @property
    def n_classes(self) -> int:
        return self.observations.shape[1]

    def __len__(self) -> int:
        return self.observations.shape[0]


# ---------------------------------------------------------------------------
# Log densities
# ---------------------------------------------------------------------------


def log_dirichlet_generic(o, alpha) -> float:
    """Standard Dirichlet log-density ``log Dir(o; alpha)``.

    Requires every ``alpha_m > 0``. Components of ``o`` that are exactly
    zero are evaluated literally: ``(alpha_m - 1) * log(0)`` yields +/-inf
    depending on the sign of ``alpha_m - 1``, and contributes 0 when
    ``alpha_m == 1``.
    """
    o = as_simplex(o)
    a = np.asarray(alpha, dtype=float)
    if a.shape != o.shape:
        raise ValueError(f"alpha shape {a.shape} does not match observation shape {o.shape}")
    if np.any(a <= 0) or not np.all(np.isfinite(a)):
        raise ValueError("all Dirichlet concentrations must be finite and > 0")
    with np.errstate(divide="ignore"):
        log_o = np.log(o)
    terms = np.where(a == 1.0, 0.0, (a - 1.0) * log_o)
    return float(gammaln(a.sum()) - gammaln(a).sum() + terms.sum())


def log_dirichlet_hbni(o, c: int, theta_c: float) -> float:
    """Log-density of ``Dir(o; theta_c * 1_c + 1)`` in closed form.

    Only three terms survive for this concentration pattern:
    ``-lgamma(1 + theta_c) + lgamma(M + theta_c) + theta_c * log(o_c)``.
    Agrees with :func:`log_dirichlet_generic` at the corresponding alpha
    to ~1e-15.  Returns ``-inf`` when ``o_c == 0`` and ``theta_c > 0``.
    """
    o = as_simplex(o)
    m = o.shape[0]
    c = check_class_label(c, m)
    theta_c = float(theta_c)
    if not (math.isfinite(theta_c) and theta_c >= 0):
        raise ValueError(f"theta must be finite and >= 0, got {theta_c!r}")
    oc = o[c - 1]
    if theta_c == 0.0:
        return float(gammaln(m))  # uniform Dirichlet: density (M-1)!
    if oc == 0.0:
        return -math.inf
    return float(-gammaln(1.0 + theta_c) + gammaln(m + theta_c) + theta_c * math.log(oc))


def log_gamma_density(x: float, shape: float, scale: float) -> float:
    """Normalized gamma log-density with (shape, scale) parameterization."""
    x, shape, scale = float(x), float(shape), float(scale)
    if x <= 0 or shape <= 0 or scale <= 0:
        raise ValueError("x, shape and scale must all be > 0")
    return (shape - 1.0) * math.log(x) - x / scale - float(gammaln(shape)) - shape * math.log(scale)


def log_gamma_kernel(x: float, shape: float, scale: float) -> float:
    """Unnormalized gamma log-kernel ``(shape-1)*log(x) - x/scale``.

    Differences of the kernel at fixed (shape, scale) equal differences
    of :func:`log_gamma_density`; MH acceptance ratios use this form.
    """
    x, shape, scale = float(x), float(shape), float(scale)
    if x <= 0 or shape <= 0 or scale <= 0:
        raise ValueError("x, shape and scale must all be > 0")
    return (shape - 1.0) * math.log(x) - x / scale


def log_categorical(c: int, prior) -> float:
    """``log p_c`` under a categorical prior; ``-inf`` for zero-mass classes."""
    p = as_simplex(prior)
    c = check_class_label(c, p.shape[0])
    pc = p[c - 1]
    return -math.inf if pc == 0.0 else float(math.log(pc))
