"""Exception hierarchy shared by all modules."""


class MaxitiveError(Exception):
    """Base class for library errors."""


class ValidationError(MaxitiveError, ValueError):
    """Input violates a documented invariant or precondition."""


class UnknownLabelError(ValidationError, KeyError):
    """A set member or map key does not belong to the support."""

    def __str__(self):
        return Exception.__str__(self)


class NotNormalizedError(ValidationError):
    pass


class AllZeroError(ValidationError):
    pass


class ModeError(ValidationError):
    """Operation is undefined for the distribution's semiring mode."""


class EmptySetError(ValidationError):
    pass


class ImageOutsideBoxError(ValidationError):
    pass


class SupportMismatchError(ValidationError):
    pass


class DimensionError(ValidationError):
    pass


class DomainError(ValidationError):
    """A parameter point lies outside the domain of the likelihood."""


class UndefinedDistanceError(ValidationError):
    """Both likelihood values are zero."""


class InfeasibleError(ValidationError):
    """The fiber of an interest value does not meet the parameter box."""


class OptimizerFailure(MaxitiveError):
    """No optimizer start converged; ``diagnostics`` holds per-start details."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class ParseError(MaxitiveError):
    """Input is not well-formed (bad JSON, schema violation, malformed flag)."""
