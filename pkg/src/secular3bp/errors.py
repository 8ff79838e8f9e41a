"""Exception types shared across the package."""


class DomainError(ValueError):
    """An input is outside the physical or mathematical domain of an operation."""


class SingularityError(DomainError):
    """Evaluation requested at a collision or coordinate singularity."""


class NoEquilibriumError(DomainError):
    """No apsidal-aligned equilibrium eccentricity exists for these parameters."""


class LevelNotAttainedError(DomainError):
    """Requested level value is below the minimum of the planar Hamiltonian."""


class QuadratureError(RuntimeError):
    """The averaging quadrature met a non-finite sample or unusable signal."""
