"""Exception and warning types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the map or operation."""


class BoundInvalid(ValueError):
    """Coupling strength at or below the threshold where W_inf is finite."""


class SingularOrbit(ArithmeticError):
    """An orbit hit the critical point to machine precision."""


class DegenerateSample(ValueError):
    """Too few (or too coincident) samples for the requested estimate."""


class EmptyBall(ValueError):
    """A query ball contains no samples."""


class InvalidModel(ValueError):
    """Affine Cantor model parameters violate p < 0 or 0 < alpha < -p."""


class PoorFitWarning(UserWarning):
    """Log-log regression quality below threshold, or too many empty balls."""
