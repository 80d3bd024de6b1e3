"""Exception hierarchy shared by every module."""


class QuotSeriesError(Exception):
    """Base class for all package errors."""


class NonInvertible(QuotSeriesError, ZeroDivisionError):
    """Raised when dividing by an element (or series) without an inverse."""


class DomainError(QuotSeriesError, ValueError):
    """An operation was called outside its domain, e.g. log of a series with constant term != 1."""


class TruncationError(QuotSeriesError, IndexError):
    """A coefficient was requested at or beyond the known precision."""


class SymmetryViolation(QuotSeriesError, ArithmeticError):
    """A supposedly symmetric expression did not reduce to a rational q-series."""


class InternalError(QuotSeriesError, AssertionError):
    """An internal consistency check failed (a bug, not a user error)."""


class ContradictionError(QuotSeriesError, ArithmeticError):
    """A triangular linear system turned out to be inconsistent."""


class NoCertificate(QuotSeriesError):
    """No pole certificate could be reconstructed at the requested order."""


class ConfigError(QuotSeriesError, ValueError):
    """Invalid run configuration; ``field`` names the offending key."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")
