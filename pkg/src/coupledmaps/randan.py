"""Random analog of the skew pair: additive noise drawn from a physical measure.

Noise values are i.i.d. picks (with replacement) from a long orbit of
T~(x) = c2(1 - 2x^2). Two recursions are offered:

  literal:     x_{n+1} = k x_n + (1 - k) w_n
  slave_form:  y_{n+1} = (1 - k) T~(y_n) + k w_n
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .ergodic import Histogram, SampleSet, density_histogram
from .errors import DomainError
from .maps import BURN_IN, QuadraticMap, _check_count, confine, iterate_master

HISTOGRAM_CSV_COLUMNS = ("bin_left", "bin_right", "mass", "variant", "k", "seed")


class Variant(str, enum.Enum):
    LITERAL = "literal"
    SLAVE_FORM = "slave_form"


@dataclass(frozen=True)
class NoiseSampler:
    """Resamples a reservoir of orbit points; draws are a pure function of seed."""

    reservoir: np.ndarray = field(repr=False)
    seed: int = 0
    c: float = 1.0

    def __post_init__(self):
        reservoir = np.asarray(self.reservoir, dtype=float)
        if reservoir.size == 0:
            raise DomainError("empty reservoir")
        if np.any(np.abs(reservoir) > 1.0):
            raise DomainError("reservoir leaves [-1, 1]")
        reservoir.flags.writeable = False
        object.__setattr__(self, "reservoir", reservoir)

    @property
    def measure(self) -> SampleSet:
        return SampleSet(self.reservoir)

    def draws(self, n: int) -> np.ndarray:
        rng = np.random.Generator(np.random.PCG64(self.seed))
        return self.reservoir[rng.integers(0, len(self.reservoir), size=n)]


def build_noise_sampler(
    c2: float, n: int, burn_in: int = BURN_IN, seed: int = 0, x0: float = 0.1234
) -> NoiseSampler:
    orbit = iterate_master(QuadraticMap(c2), x0, n, burn_in)
    return NoiseSampler(reservoir=orbit, seed=seed, c=c2)


@dataclass(frozen=True)
class NoisyRun:
    variant: Variant
    k: float
    orbit: np.ndarray = field(repr=False)
    seed: int
    x0: float


def iterate_noisy(
    sampler: NoiseSampler, k: float, x0: float, n: int, variant: str = "literal"
) -> NoisyRun:
    """n steps of the chosen recursion; the orbit excludes x0."""
    variant = Variant(variant)
    if not 0.0 <= k <= 1.0:
        raise DomainError(f"k={k!r} outside [0, 1]")
    x0 = confine(x0, "x0")
    n = _check_count(n, "n", 1)
    omegas = sampler.draws(n)
    if variant is Variant.LITERAL:
        orbit = _kernels.noisy_literal(float(k), x0, omegas)
    else:
        orbit = _kernels.noisy_slave_form(sampler.c, float(k), x0, omegas)
    return NoisyRun(variant=variant, k=float(k), orbit=orbit, seed=sampler.seed, x0=x0)


def stationary_histogram(run: NoisyRun, bins: int = 100, burn_in: int = 0) -> Histogram:
    if burn_in >= len(run.orbit):
        raise DomainError("burn_in consumes the whole run")
    return density_histogram(SampleSet(run.orbit[burn_in:]), bins)
