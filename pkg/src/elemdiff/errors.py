"""Exception types shared across the package."""


class ElemdiffError(Exception):
    """Base class for all package-specific errors."""


class SizeLimitError(ElemdiffError):
    """An enumeration or computation would exceed a hard size guard."""


class MismatchError(ElemdiffError):
    """Structurally incompatible operands (dimension, degree, vertex sets)."""


class PreconditionError(ElemdiffError):
    """Input violates a documented precondition."""


class SpanInstabilityError(ElemdiffError):
    """A span assumed relabel-stable turned out not to be."""
