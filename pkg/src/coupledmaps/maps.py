"""The quadratic family T(x) = c(1 - 2x^2) on [-1, 1] and the skew-coupled pair.

The master orbit evolves autonomously; the slave is pulled toward the
master's image with convex weight k:

    x_{n+1} = c1 (1 - 2 x_n^2)
    y_{n+1} = (1 - k) c2 (1 - 2 y_n^2) + k c1 (1 - 2 x_n^2)

Orbit arrays returned here never contain the initial point: entry i is the
state after ``burn_in + i + 1`` applications of the map.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import DomainError

BURN_IN = 10_000

# rounding slack tolerated before a value is treated as outside [-1, 1]
CLAMP_SLACK = 1e-12


def confine(x: float, name: str = "x") -> float:
    """Return x clamped to [-1, 1]; raise if it is off by more than rounding."""
    x = float(x)
    if not np.isfinite(x) or abs(x) > 1.0 + CLAMP_SLACK:
        raise DomainError(f"{name}={x!r} outside [-1, 1]")
    return min(1.0, max(-1.0, x))


def _check_parameter(value: float, name: str, lo_open: bool = True) -> float:
    value = float(value)
    ok = (0.0 < value <= 1.0) if lo_open else (0.0 <= value <= 1.0)
    if not ok:
        interval = "(0, 1]" if lo_open else "[0, 1]"
        raise DomainError(f"{name}={value!r} outside {interval}")
    return value


def _check_count(n: int, name: str, minimum: int) -> int:
    if int(n) != n or n < minimum:
        raise DomainError(f"{name} must be an integer >= {minimum}, got {n!r}")
    return int(n)


@dataclass(frozen=True)
class QuadraticMap:
    c: float

    def __post_init__(self):
        object.__setattr__(self, "c", _check_parameter(self.c, "c"))

    def __call__(self, x: float) -> float:
        return eval_map(self, x)


@dataclass(frozen=True)
class SkewSystem:
    """Master parameter c1, slave parameter c2, coupling strength k."""

    c1: float
    c2: float
    k: float

    def __post_init__(self):
        object.__setattr__(self, "c1", _check_parameter(self.c1, "c1"))
        object.__setattr__(self, "c2", _check_parameter(self.c2, "c2"))
        object.__setattr__(self, "k", _check_parameter(self.k, "k", lo_open=False))

    @property
    def master(self) -> QuadraticMap:
        return QuadraticMap(self.c1)

    @property
    def slave(self) -> QuadraticMap:
        return QuadraticMap(self.c2)


@dataclass(frozen=True)
class CoupledTrajectory:
    system: SkewSystem
    xs: np.ndarray = field(repr=False)
    ys: np.ndarray = field(repr=False)
    x0: float
    y0: float
    burn_in: int

    def __len__(self) -> int:
        return len(self.xs)


def eval_map(m: QuadraticMap, x: float) -> float:
    x = confine(x)
    return m.c * (1.0 - 2.0 * x * x)


def derivative(m: QuadraticMap, x: float) -> float:
    x = confine(x)
    return -4.0 * m.c * x


def _check_confined(values: np.ndarray) -> np.ndarray:
    if values.size and not np.all(np.abs(values) <= 1.0):
        raise DomainError("orbit left [-1, 1]")
    return values


def iterate_master(m: QuadraticMap, x0: float, n: int, burn_in: int = BURN_IN) -> np.ndarray:
    """Iterates T^{b+1}(x0), ..., T^{b+n}(x0) with b = burn_in."""
    x0 = confine(x0, "x0")
    n = _check_count(n, "n", 1)
    burn_in = _check_count(burn_in, "burn_in", 0)
    return _check_confined(_kernels.quadratic_orbit(m.c, x0, n, burn_in))


def iterate_skew(
    system: SkewSystem, x0: float, y0: float, n: int, burn_in: int = BURN_IN
) -> CoupledTrajectory:
    """Run the coupled pair; y_{n+1} is built from x_n, the same index as y_n."""
    x0 = confine(x0, "x0")
    y0 = confine(y0, "y0")
    n = _check_count(n, "n", 1)
    burn_in = _check_count(burn_in, "burn_in", 0)
    xs, ys = _kernels.skew_orbit(system.c1, system.c2, system.k, x0, y0, n, burn_in)
    return CoupledTrajectory(
        system=system,
        xs=_check_confined(xs),
        ys=_check_confined(ys),
        x0=x0,
        y0=y0,
        burn_in=burn_in,
    )


def fixed_point(m: QuadraticMap) -> float:
    """The fixed point in [0, 1): positive root of 2c x^2 + x - c = 0."""
    c = m.c
    return (-1.0 + np.sqrt(1.0 + 8.0 * c * c)) / (4.0 * c)
