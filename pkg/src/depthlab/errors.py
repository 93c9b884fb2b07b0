"""Semantic exceptions shared across the library."""


class DepthLabError(Exception):
    """Base class for every error raised by depthlab."""


class InputError(DepthLabError, ValueError):
    """Inputs violate an operation's contract (shape, dimension, degeneracy)."""


class DegenerateQueryError(InputError):
    """Query point lies on the reference hyperplane; the quantity is undefined."""


class UnsupportedDimensionError(InputError):
    """Exact computation is only guaranteed in low dimensions."""


class SingularMatrixError(InputError):
    """A projective transform matrix must be invertible."""


class VerificationError(DepthLabError):
    """A result failed its own re-verification; never silently ignored."""


class SearchBudgetError(DepthLabError):
    """A bounded search ran out of candidates without a verified result."""
