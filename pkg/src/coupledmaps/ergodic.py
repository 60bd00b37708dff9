"""Empirical measures, Lyapunov exponents, bifurcation scans.

Empirical measures are uniform atomic measures on orbit points, stored as
sorted arrays. The Lyapunov estimators average log|T'| along an orbit; the
slave variant evaluates the *master* derivative -4 c1 y at slave points.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import _kernels
from .errors import BoundInvalid, DomainError, SingularOrbit
from .maps import (
    BURN_IN,
    QuadraticMap,
    SkewSystem,
    _check_count,
    confine,
    iterate_master,
    iterate_skew,
)
from .sync import delta_series, w_infinity

# dead zone around zero for the sign of the exponent
CLASSIFY_TOL = 0.01
# resolution at which attractor samples are considered equal
DISTINCT_RESOLUTION = 1e-6
MAX_CYCLE = 64


@dataclass(frozen=True)
class SampleSet:
    """Uniform atomic probability measure on a sorted array of points."""

    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.sort(np.asarray(self.values, dtype=float).ravel())
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return len(self.values)

    @property
    def weight(self) -> float:
        return 1.0 / len(self.values)

    @property
    def span(self) -> float:
        return float(self.values[-1] - self.values[0])

    def mean(self) -> float:
        return float(np.mean(self.values))


def empirical_measure(orbit: Sequence[float]) -> SampleSet:
    orbit = np.asarray(orbit, dtype=float)
    if orbit.size == 0:
        raise DomainError("empty orbit")
    return SampleSet(orbit)


@dataclass(frozen=True)
class LyapunovEstimate:
    value: float
    n: int
    partial_series: Optional[np.ndarray] = field(default=None, repr=False)


def _finish(total, running, hit, n, start, stride):
    if hit >= 0:
        raise SingularOrbit(f"|T'| < 1e-300 at step {start + hit}")
    value = total / n
    partial = None
    if stride > 0:
        partial = running if n % stride == 0 else np.append(running, value)
    return LyapunovEstimate(value=value, n=n, partial_series=partial)


def lyapunov_master(
    m: QuadraticMap, x0: float, n: int, burn_in: int = BURN_IN, stride: int = 0
) -> LyapunovEstimate:
    """(1/n) sum log|T'(x_i)| over the n points starting at x_{burn_in}.

    With ``stride > 0`` the running average is recorded every ``stride``
    steps; its final entry is always the returned value.
    """
    x0 = confine(x0, "x0")
    n = _check_count(n, "n", 1)
    burn_in = _check_count(burn_in, "burn_in", 0)
    total, running, hit = _kernels.log_derivative_sum(m.c, x0, n, burn_in, int(stride))
    return _finish(total, running, hit, n, burn_in, stride)


def lyapunov_slave(
    system: SkewSystem,
    x0: float,
    y0: float,
    n: int,
    burn_in: int = BURN_IN,
    stride: int = 0,
) -> LyapunovEstimate:
    """(1/n) sum log|-4 c1 y_i| along the slave orbit."""
    x0 = confine(x0, "x0")
    y0 = confine(y0, "y0")
    n = _check_count(n, "n", 1)
    burn_in = _check_count(burn_in, "burn_in", 0)
    total, running, hit = _kernels.slave_log_derivative_sum(
        system.c1, system.c2, system.k, x0, y0, n, burn_in, int(stride)
    )
    return _finish(total, running, hit, n, burn_in, stride)


def log_derivative_chain(m: QuadraticMap, x0: float, n: int) -> float:
    """log|(T^n)'(x0)| via the chain rule, renormalising the running product."""
    x = confine(x0, "x0")
    mantissa, exponent = 1.0, 0
    for _ in range(n):
        mantissa *= -4.0 * m.c * x
        mantissa, e = np.frexp(mantissa)
        exponent += int(e)
        x = m.c * (1.0 - 2.0 * x * x)
    if mantissa == 0.0:
        raise SingularOrbit("orbit passes through the critical point")
    return float(np.log(abs(mantissa)) + exponent * np.log(2.0))


def wasserstein1(a: SampleSet, b: SampleSet) -> float:
    """1-Wasserstein distance between two uniform atomic measures on the line."""
    u, v = a.values, b.values
    if len(u) == 0 or len(v) == 0:
        raise DomainError("empty sample set")
    if len(u) == len(v):
        return float(np.mean(np.abs(u - v)))
    # integral of |F_a - F_b| between consecutive merged support points
    grid = np.concatenate((u, v))
    grid.sort(kind="mergesort")
    widths = np.diff(grid)
    fa = np.searchsorted(u, grid[:-1], side="right") / len(u)
    fb = np.searchsorted(v, grid[:-1], side="right") / len(v)
    return float(np.sum(np.abs(fa - fb) * widths))


def birkhoff_gap(traj, f: Callable[[np.ndarray], np.ndarray]) -> float:
    """|avg f(y_i) - avg f(x_i)| along a coupled trajectory."""
    return float(abs(np.mean(f(traj.ys)) - np.mean(f(traj.xs))))


@dataclass(frozen=True)
class ConvergenceRow:
    k: float
    w1: float
    w_inf: Optional[float]
    mean_delta: float
    tail_max_delta: float
    flag: str = ""


def sync_convergence_scan(
    c1: float,
    c2: float,
    k_grid: Sequence[float],
    n: int,
    x0: float = 0.1234,
    y0: float = 0.55,
    burn_in: int = BURN_IN,
) -> list[ConvergenceRow]:
    """W1 distance between master and slave empirical measures, per k.

    Rows with k below the coupling threshold carry flag BOUND_INVALID and an
    empty w_inf instead of raising.
    """
    rows = []
    for k in sorted(k_grid):
        traj = iterate_skew(SkewSystem(c1, c2, k), x0, y0, n, burn_in)
        delta = delta_series(traj)
        w1 = wasserstein1(SampleSet(traj.xs), SampleSet(traj.ys))
        try:
            w_inf, flag = w_infinity(c1, c2, k), ""
        except BoundInvalid:
            w_inf, flag = None, "BOUND_INVALID"
        rows.append(
            ConvergenceRow(
                k=float(k),
                w1=w1,
                w_inf=w_inf,
                mean_delta=float(delta.mean()),
                tail_max_delta=float(delta.max()),
                flag=flag,
            )
        )
    return rows


class AttractorKind(str, enum.Enum):
    PERIODIC = "periodic"
    CHAOTIC_INTERVAL = "chaotic_interval"
    UNDETERMINED = "undetermined"


def distinct_count(samples: np.ndarray, resolution: float = DISTINCT_RESOLUTION) -> int:
    return len(np.unique(np.round(np.asarray(samples) / resolution)))


def classify_attractor(
    lyapunov: float,
    samples: Sequence[float],
    tol: float = CLASSIFY_TOL,
    resolution: float = DISTINCT_RESOLUTION,
    max_cycle: int = MAX_CYCLE,
) -> AttractorKind:
    samples = np.asarray(samples, dtype=float)
    if samples.size == 0:
        raise DomainError("no samples")
    if lyapunov < -tol and distinct_count(samples, resolution) <= max_cycle:
        return AttractorKind.PERIODIC
    if lyapunov > tol:
        return AttractorKind.CHAOTIC_INTERVAL
    # near-zero exponents: Cantor attractors, bifurcation points
    return AttractorKind.UNDETERMINED


@dataclass(frozen=True)
class BifurcationRow:
    c: float
    attractor_samples: np.ndarray = field(repr=False)
    lyapunov: float
    classification: AttractorKind


def bifurcation_scan(
    c_grid: Sequence[float],
    x0: float,
    n: int,
    burn_in: int = BURN_IN,
    keep: int = 200,
) -> list[BifurcationRow]:
    """Per c: the last ``keep`` of n post-burn-in points and the exponent."""
    keep = min(_check_count(keep, "keep", 1), n)
    rows = []
    for c in c_grid:
        m = QuadraticMap(c)
        orbit = iterate_master(m, x0, n, burn_in)
        try:
            lam = lyapunov_master(m, x0, n, burn_in).value
        except SingularOrbit:
            # superstable cycle through the critical point
            lam = -np.inf
        samples = orbit[-keep:]
        rows.append(
            BifurcationRow(
                c=float(c),
                attractor_samples=samples,
                lyapunov=float(lam),
                classification=classify_attractor(lam, samples),
            )
        )
    return rows


@dataclass(frozen=True)
class Histogram:
    edges: np.ndarray = field(repr=False)
    masses: np.ndarray = field(repr=False)
    overflow: int = 0

    @property
    def bins(self) -> int:
        return len(self.masses)


def density_histogram(
    m: SampleSet, bins: int = 100, range: tuple[float, float] = (-1.0, 1.0)
) -> Histogram:
    """Bin masses (count / n); points outside ``range`` are counted in overflow."""
    bins = _check_count(bins, "bins", 1)
    lo, hi = range
    values = m.values
    counts, edges = np.histogram(values, bins=bins, range=(lo, hi))
    inside = int(counts.sum())
    return Histogram(edges=edges, masses=counts / len(values), overflow=len(values) - inside)


def total_variation(a: Histogram, b: Histogram) -> float:
    if not np.array_equal(a.edges, b.edges):
        raise DomainError("histograms have different bins")
    return 0.5 * float(np.abs(a.masses - b.masses).sum())
