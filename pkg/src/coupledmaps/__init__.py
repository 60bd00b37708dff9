"""Master/slave coupled quadratic maps: synchronization bounds, Lyapunov
exponents, empirical measures and generalized dimensions."""

__version__ = "0.1.0"

from .errors import (
    BoundInvalid,
    DegenerateSample,
    DomainError,
    EmptyBall,
    InvalidModel,
    PoorFitWarning,
    SingularOrbit,
)
from .maps import (
    CoupledTrajectory,
    QuadraticMap,
    SkewSystem,
    derivative,
    eval_map,
    iterate_master,
    iterate_skew,
)

__all__ = [
    "BoundInvalid",
    "CoupledTrajectory",
    "DegenerateSample",
    "DomainError",
    "EmptyBall",
    "InvalidModel",
    "PoorFitWarning",
    "QuadraticMap",
    "SingularOrbit",
    "SkewSystem",
    "derivative",
    "eval_map",
    "iterate_master",
    "iterate_skew",
]
