"""Exception types shared across the package."""


class BernlppError(Exception):
    """Base class for all package errors."""


class OutOfRangeError(BernlppError, ValueError):
    """An argument lies outside its admissible range."""


class MissingBoundaryParamError(BernlppError, ValueError):
    """A boundary-model operation was called without the boundary parameter u."""


class FlatRegimeError(BernlppError, ValueError):
    """The query direction lies in the flat edge, where the requested quantity degenerates."""


class DomainError(BernlppError, ValueError):
    """The argument lies at or beyond a pole of the underlying generating function."""


class NonFiniteError(BernlppError, ArithmeticError):
    """An objective is infinite on its whole domain."""


class TooLargeError(BernlppError, ValueError):
    """An exact enumeration would exceed its budget."""


class GridMismatchError(BernlppError, ValueError):
    """Two sampled functions do not share a common uniform grid."""


class ConfigError(BernlppError, ValueError):
    """Invalid experiment configuration."""
