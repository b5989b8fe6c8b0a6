"""Exception types shared across the toolkit."""


class EchoChanError(Exception):
    """Base class for all toolkit errors."""


class SizeError(EchoChanError):
    """A tensor-product dimension grew beyond the configured maximum."""


class ShapeError(EchoChanError):
    """Inconsistent matrix/vector dimensions or factorizations."""


class DomainError(EchoChanError):
    """A scalar argument lies outside its mathematical domain."""


class ValidityError(EchoChanError):
    """A state, operator, or probability vector violates its invariants."""


class NumericalError(EchoChanError):
    """An iterative numerical routine failed to converge."""


class UnsupportedRepresentationError(EchoChanError):
    """The requested exact representation does not exist for this object."""


class ProtocolFailure(EchoChanError):
    """A protocol trial violated an exactness invariant.

    Carries the offending trial's trace (when available) in ``trace``.
    """

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace
