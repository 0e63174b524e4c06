"""Exception hierarchy.

The CLI maps :class:`DomainError` subclasses to exit code 2 and
:class:`ResourceError` subclasses to exit code 3.
"""


class OccupancyError(Exception):
    pass


class DomainError(OccupancyError, ValueError):
    """Inputs outside the mathematical domain of an operation."""


class ParameterDomainError(DomainError):
    pass


class DegenerateSigmaError(DomainError):
    """sigma^2 == 0, so nothing can be standardized by sigma."""


class DegenerateVarianceError(DomainError):
    pass


class DimensionCapError(DomainError):
    pass


class ResourceError(OccupancyError):
    """A configured size cap or numerical tolerance was not met."""


class ResourceCapError(ResourceError):
    pass


class ToleranceNotReachedError(ResourceError):
    def __init__(self, message, estimate=None, achieved=None):
        super().__init__(message)
        self.estimate = estimate
        self.achieved = achieved


class RootValidationError(ResourceError):
    """Recovered PGF roots fail the real/non-positive reconstruction check."""
