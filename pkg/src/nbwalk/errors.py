"""Exception hierarchy for nbwalk."""


class NbWalkError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(NbWalkError, ValueError):
    """An argument lies outside the domain of the operation."""


class ConfigError(NbWalkError, ValueError):
    """A walk configuration or scheme is invalid or inconsistent."""


class ContractError(NbWalkError, ValueError):
    """Inputs violate a cross-argument contract (e.g. mismatched loss parameter)."""


class SingularityError(DomainError):
    """The generalized Brillouin zone radius diverges or vanishes."""


class DegenerateDispersionError(DomainError):
    """cos(theta1) = 0: the quadratic in beta loses its leading and constant terms."""


class EpProximityError(NbWalkError, ArithmeticError):
    """The operator is numerically defective (too close to an exceptional point)."""


class SolverError(NbWalkError, ArithmeticError):
    """The dense eigensolver failed to converge or to meet its residual contract."""


class ResourceError(NbWalkError):
    """The requested computation exceeds a configured size cap."""


class BracketingError(NbWalkError, ArithmeticError):
    """A root-finding bracket does not straddle a sign change."""
