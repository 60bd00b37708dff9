"""Legendre transform of singularity spectra and the affine Cantor-pole model.

The toy model: a piecewise expanding circle map with branches 0, 1, 2, affine
on branches 0 and 2 with slopes exp(lambda0), exp(lambda2). K is the Cantor
set of points never entering branch 1; u = -log|T'| has pressure
p = log(exp(-lambda0) + exp(-lambda2)) < 0 on K. A density blowing up on K
with strength alpha in (0, -p) gives points of K with Lyapunov exponent
lambda the local dimension 1 + (p + alpha)/lambda, carried on a set of
dimension g(lambda); every point off K has local dimension 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .dimension import DqSpectrum
from .errors import DomainError, InvalidModel

DEFAULT_N_LAMBDA = 101


@dataclass(frozen=True)
class SingularitySpectrum:
    """Finite set of (alpha, f(alpha)) points."""

    alphas: np.ndarray
    fs: np.ndarray

    def __post_init__(self):
        alphas = np.atleast_1d(np.asarray(self.alphas, dtype=float))
        fs = np.atleast_1d(np.asarray(self.fs, dtype=float))
        if alphas.shape != fs.shape or alphas.size == 0:
            raise DomainError("spectrum needs matching, nonempty alpha and f arrays")
        if np.any(fs < 0) or np.any(fs > 1 + 1e-12):
            raise DomainError("f(alpha) must lie in [0, 1]")
        object.__setattr__(self, "alphas", alphas)
        object.__setattr__(self, "fs", fs)

    @classmethod
    def from_points(cls, points: Iterable[tuple[float, float]]) -> "SingularitySpectrum":
        pts = list(points)
        return cls(np.array([a for a, _ in pts]), np.array([f for _, f in pts]))

    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.alphas.tolist(), self.fs.tolist()))

    def __len__(self) -> int:
        return len(self.alphas)


def legendre_dq(spec: SingularitySpectrum, q: float) -> float:
    """D_q = inf_alpha {q alpha - f(alpha)} / (q - 1)."""
    if q == 1:
        raise DomainError("the Legendre form is undefined at q = 1")
    tau = float(np.min(q * spec.alphas - spec.fs))
    return tau / (q - 1.0)


@dataclass(frozen=True)
class AffineCantorModel:
    lambda0: float
    lambda2: float
    alpha: float

    def __post_init__(self):
        if not (self.lambda0 > 0 and self.lambda2 > 0):
            raise InvalidModel("expansion exponents must be positive")

    @property
    def lambda_interval(self) -> tuple[float, float]:
        return min(self.lambda0, self.lambda2), max(self.lambda0, self.lambda2)

    def validate(self) -> "AffineCantorModel":
        p = pressure(self)
        if not 0 < self.alpha < -p:
            raise InvalidModel(f"alpha={self.alpha} outside (0, {-p:.6g})")
        return self


def pressure(model: AffineCantorModel) -> float:
    """Pressure of -log|T'| on K: log(exp(-lambda0) + exp(-lambda2))."""
    p = float(np.logaddexp(-model.lambda0, -model.lambda2))
    if p >= 0:
        raise InvalidModel(f"pressure {p:.6g} is not negative")
    return p


def _entropy(t: float) -> float:
    if t <= 0.0 or t >= 1.0:
        return 0.0
    return -t * math.log(t) - (1.0 - t) * math.log(1.0 - t)


def lyapunov_spectrum_g(model: AffineCantorModel, lam: float) -> float:
    """Hausdorff dimension of the level set {Lyapunov exponent = lam} in K.

    Writing lam = t lambda0 + (1 - t) lambda2, the level set carries the
    (t, 1 - t) Bernoulli measure, of dimension H(t) / lam.
    """
    lo, hi = model.lambda_interval
    if not lo - 1e-12 <= lam <= hi + 1e-12:
        raise DomainError(f"lambda={lam} outside [{lo}, {hi}]")
    if model.lambda0 == model.lambda2:
        return math.log(2.0) / model.lambda0
    t = (lam - model.lambda2) / (model.lambda0 - model.lambda2)
    return _entropy(min(1.0, max(0.0, t))) / lam


def toy_local_dimension(model: AffineCantorModel, lam: float) -> float:
    p = pressure(model)
    model.validate()
    lo, hi = model.lambda_interval
    if not lo - 1e-12 <= lam <= hi + 1e-12:
        raise DomainError(f"lambda={lam} outside [{lo}, {hi}]")
    return 1.0 + (p + model.alpha) / lam


def toy_spectrum(model: AffineCantorModel, n_lambda: int = DEFAULT_N_LAMBDA) -> SingularitySpectrum:
    """Level-set points over a lambda grid, plus (1, 1) for points off K."""
    if n_lambda < 1:
        raise DomainError("n_lambda must be >= 1")
    model.validate()
    lo, hi = model.lambda_interval
    grid = np.array([lo]) if lo == hi else np.linspace(lo, hi, n_lambda)
    points = [(toy_local_dimension(model, lam), lyapunov_spectrum_g(model, lam)) for lam in grid]
    points.append((1.0, 1.0))
    return SingularitySpectrum.from_points(points)


def toy_dq(
    model: AffineCantorModel, q_grid: Sequence[float], n_lambda: int = DEFAULT_N_LAMBDA
) -> DqSpectrum:
    spec = toy_spectrum(model, n_lambda)
    qs = np.asarray(q_grid, dtype=float)
    return DqSpectrum(qs=qs, dqs=np.array([legendre_dq(spec, q) for q in qs]))
