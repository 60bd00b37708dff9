"""Generalized dimensions of one-dimensional sample sets.

The correlation sum at radius r and order q is

    C_q(r) = (1/n) sum_i m_i(r)^(q-1),   m_i(r) = #{j != i : |x_i - x_j| <= r} / (n - 1)

and D_q is the slope of log C_q(r) against (q - 1) log r over a window of
geometrically spaced radii. Ball counts come from a sorted copy of the
samples, two binary searches per point and radius, so a radius costs
O(n log n) instead of the O(n^2) pair loop.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .ergodic import SampleSet
from .errors import DegenerateSample, DomainError, EmptyBall, PoorFitWarning

MIN_R2 = 0.98
MAX_EXCLUDED_FRAC = 0.01
DEFAULT_N_RADII = 16
# window: [n**-LOWER_EXPONENT * span, UPPER_FRACTION * span]
LOWER_EXPONENT = 0.8
UPPER_FRACTION = 0.01

SPECTRUM_CSV_COLUMNS = ("q", "dq", "fit_r2", "r_min", "r_max", "excluded_frac")

RNG_ALGORITHM = "numpy.random.PCG64"


def _sorted_values(m) -> np.ndarray:
    if isinstance(m, SampleSet):
        return m.values
    return np.sort(np.asarray(m, dtype=float).ravel())


def _right_edge(xs: np.ndarray, centers: np.ndarray, r: float) -> np.ndarray:
    """First index j with xs[j] - center > r, using the exact predicate."""
    n = len(xs)
    hi = np.searchsorted(xs, centers + r, side="right")
    # walk down while xs[hi-1] is outside the ball
    while True:
        idx = np.clip(hi - 1, 0, n - 1)
        bad = (hi > 0) & (xs[idx] - centers > r)
        if not bad.any():
            break
        hi[bad] -= 1
    # walk up while xs[hi] is still inside the ball
    while True:
        idx = np.clip(hi, 0, n - 1)
        bad = (hi < n) & (xs[idx] - centers <= r)
        if not bad.any():
            break
        hi[bad] += 1
    return hi


def _left_edge(xs: np.ndarray, centers: np.ndarray, r: float) -> np.ndarray:
    """First index j with center - xs[j] <= r, using the exact predicate."""
    n = len(xs)
    lo = np.searchsorted(xs, centers - r, side="left")
    while True:
        idx = np.clip(lo, 0, n - 1)
        bad = (lo < n) & (centers - xs[idx] > r)
        if not bad.any():
            break
        lo[bad] += 1
    while True:
        idx = np.clip(lo - 1, 0, n - 1)
        bad = (lo > 0) & (centers - xs[idx] <= r)
        if not bad.any():
            break
        lo[bad] -= 1
    return lo


def ball_counts(xs: np.ndarray, r: float, centers: Optional[np.ndarray] = None) -> np.ndarray:
    """#{j : |c - xs[j]| <= r} for each center; xs must be sorted.

    Centers default to the samples themselves; subtract one to puncture.
    """
    if centers is None:
        centers = xs
    centers = np.asarray(centers, dtype=float)
    return _right_edge(xs, centers, r) - _left_edge(xs, centers, r)


def _masses(xs: np.ndarray, r: float) -> np.ndarray:
    return (ball_counts(xs, r) - 1) / (len(xs) - 1)


def _moment(masses: np.ndarray, q: float) -> tuple[float, int]:
    """(C_q, excluded) from punctured ball masses; empty balls dropped for q < 1."""
    if q < 1:
        keep = masses > 0
        excluded = int(len(masses) - keep.sum())
        if excluded == len(masses):
            return float("nan"), excluded
        return float(np.mean(masses[keep] ** (q - 1))), excluded
    return float(np.mean(masses ** (q - 1))), 0


def correlation_sum(m, q: float, r: float) -> float:
    xs = _sorted_values(m)
    if len(xs) < 2:
        raise DegenerateSample("correlation sums need at least two samples")
    if not r > 0:
        raise DomainError(f"radius must be positive, got {r!r}")
    return _moment(_masses(xs, r), q)[0]


@dataclass(frozen=True)
class CorrelationSumCurve:
    q: float
    radii: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    excluded_count: np.ndarray = field(repr=False)


def correlation_curves(m, qs: Sequence[float], radii: Sequence[float]) -> list[CorrelationSumCurve]:
    """Correlation sums for several orders, sharing one ball count per radius."""
    xs = _sorted_values(m)
    if len(xs) < 2:
        raise DegenerateSample("correlation sums need at least two samples")
    radii = np.asarray(radii, dtype=float)
    if np.any(radii <= 0):
        raise DomainError("radii must be positive")
    values = np.empty((len(qs), len(radii)))
    excluded = np.zeros((len(qs), len(radii)), dtype=np.int64)
    for j, r in enumerate(radii):
        masses = _masses(xs, r)
        for i, q in enumerate(qs):
            if q == 1:
                keep = masses > 0
                excluded[i, j] = len(masses) - keep.sum()
                values[i, j] = np.mean(np.log(masses[keep])) if keep.any() else np.nan
            else:
                values[i, j], excluded[i, j] = _moment(masses, q)
    return [
        CorrelationSumCurve(q=float(q), radii=radii, values=values[i], excluded_count=excluded[i])
        for i, q in enumerate(qs)
    ]


def default_scale_window(m) -> tuple[float, float]:
    xs = _sorted_values(m)
    span = float(xs[-1] - xs[0]) or 1.0
    return len(xs) ** -LOWER_EXPONENT * span, UPPER_FRACTION * span


def _radii(window: tuple[float, float], n_radii: int) -> np.ndarray:
    r_min, r_max = window
    if not 0 < r_min < r_max:
        raise DomainError(f"bad scale window {window!r}")
    return np.geomspace(r_max, r_min, n_radii)


def _fit(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    ok = np.isfinite(y)
    x, y = x[ok], y[ok]
    if len(x) < 2:
        raise DegenerateSample("fewer than two usable radii in the scale window")
    xc = x - x.mean()
    yc = y - y.mean()
    slope = float(xc @ yc / (xc @ xc))
    ss_tot = float(yc @ yc)
    ss_res = float(np.sum((yc - slope * xc) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return slope, r2


class DqFit(NamedTuple):
    dq: float
    fit_r2: float
    r_min: float
    r_max: float
    excluded_frac: float
    poor_fit: bool


def _dq_from_curve(curve: CorrelationSumCurve, n: int, window) -> DqFit:
    log_r = np.log(curve.radii)
    with np.errstate(divide="ignore", invalid="ignore"):
        if curve.q == 1:
            slope, r2 = _fit(log_r, curve.values)
        else:
            slope, r2 = _fit((curve.q - 1) * log_r, np.log(curve.values))
    excluded_frac = float(curve.excluded_count.max()) / n
    poor = r2 < MIN_R2 or excluded_frac >= MAX_EXCLUDED_FRAC
    if poor:
        warnings.warn(
            f"q={curve.q:g}: r2={r2:.4f}, excluded fraction {excluded_frac:.4f}",
            PoorFitWarning,
            stacklevel=3,
        )
    return DqFit(slope, r2, window[0], window[1], excluded_frac, poor)


def estimate_dq(
    m, q: float, scale_window: Optional[tuple[float, float]] = None, n_radii: int = DEFAULT_N_RADII
) -> DqFit:
    """Slope of log C_q(r) against (q - 1) log r. Use estimate_d1 for q = 1."""
    if q == 1:
        raise DomainError("q = 1 is the information dimension; use estimate_d1")
    return estimate_spectrum(m, [q], scale_window, n_radii).fits[0]


def estimate_d1(
    m, scale_window: Optional[tuple[float, float]] = None, n_radii: int = DEFAULT_N_RADII
) -> DqFit:
    """Slope of (1/n) sum log m_i(r) against log r."""
    return estimate_spectrum(m, [1.0], scale_window, n_radii).fits[0]


@dataclass(frozen=True)
class DqSpectrum:
    qs: np.ndarray
    dqs: np.ndarray
    fit_r2: Optional[np.ndarray] = None
    scale_window: Optional[tuple[float, float]] = None
    fits: tuple = field(default=(), repr=False)

    def rows(self) -> list[dict]:
        out = []
        for i, q in enumerate(self.qs):
            fit = self.fits[i] if self.fits else None
            out.append(
                {
                    "q": float(q),
                    "dq": float(self.dqs[i]),
                    "fit_r2": fit.fit_r2 if fit else "",
                    "r_min": fit.r_min if fit else "",
                    "r_max": fit.r_max if fit else "",
                    "excluded_frac": fit.excluded_frac if fit else "",
                }
            )
        return out


def estimate_spectrum(
    m,
    qs: Sequence[float],
    scale_window: Optional[tuple[float, float]] = None,
    n_radii: int = DEFAULT_N_RADII,
) -> DqSpectrum:
    """D_q for every q in ``qs`` over one shared set of ball counts."""
    xs = _sorted_values(m)
    if len(xs) < 2:
        raise DegenerateSample("need at least two samples")
    window = tuple(scale_window) if scale_window is not None else default_scale_window(xs)
    curves = correlation_curves(xs, qs, _radii(window, n_radii))
    fits = tuple(_dq_from_curve(curve, len(xs), window) for curve in curves)
    return DqSpectrum(
        qs=np.asarray(qs, dtype=float),
        dqs=np.array([f.dq for f in fits]),
        fit_r2=np.array([f.fit_r2 for f in fits]),
        scale_window=window,
        fits=fits,
    )


@dataclass(frozen=True)
class LocalDimensionEstimate:
    x: float
    d: float
    radii: np.ndarray = field(repr=False)


def local_dimension(m, x: float, radii: Sequence[float]) -> LocalDimensionEstimate:
    """Slope of log mu(B(x, r)) against log r; x need not be a sample."""
    xs = _sorted_values(m)
    radii = np.asarray(radii, dtype=float)
    if np.any(radii <= 0) or np.any(np.diff(radii) >= 0):
        raise DomainError("radii must be positive and strictly decreasing")
    center = np.array([float(x)])
    counts = np.array([ball_counts(xs, r, center)[0] for r in radii])
    if counts[-1] == 0:
        raise EmptyBall(f"no samples within {radii[-1]:g} of {x:g}")
    slope, _ = _fit(np.log(radii), np.log(counts / len(xs)))
    return LocalDimensionEstimate(x=float(x), d=max(slope, 0.0), radii=radii)


def dq_bc_analytic(q: float) -> float:
    """D_q of an invariant density with inverse-square-root poles."""
    return 1.0 if q < 2 else q / (2.0 * (q - 1.0))


ORACLE_KINDS = ("uniform", "dirac", "cantor3", "arcsine")
CANTOR_DIGITS = 40


def oracle_samples(kind: str, n: int, seed: int = 0, dirac_at: float = 0.0) -> SampleSet:
    """Seeded samples from measures with known D_q.

    uniform on [0, 1], a Dirac mass, the middle-thirds Cantor measure
    (40 random ternary digits from {0, 2}), and the arcsine law x = cos(pi U).
    """
    if n < 1:
        raise DomainError("n must be >= 1")
    rng = np.random.Generator(np.random.PCG64(seed))
    if kind == "uniform":
        values = rng.random(n)
    elif kind == "dirac":
        values = np.full(n, float(dirac_at))
    elif kind == "cantor3":
        weights = 3.0 ** -np.arange(1, CANTOR_DIGITS + 1)
        values = np.zeros(n)
        chunk = 1 << 18
        for start in range(0, n, chunk):
            size = min(chunk, n - start)
            digits = 2 * rng.integers(0, 2, size=(size, CANTOR_DIGITS), dtype=np.int8)
            values[start:start + size] = digits @ weights
    elif kind == "arcsine":
        values = np.cos(np.pi * rng.random(n))
    else:
        raise DomainError(f"unknown oracle {kind!r}; expected one of {ORACLE_KINDS}")
    return SampleSet(values)
