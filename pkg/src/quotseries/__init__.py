"""Exact generating-series engine for punctual Quot-scheme invariants."""

from .errors import (
    ConfigError,
    ContradictionError,
    DomainError,
    InternalError,
    NoCertificate,
    NonInvertible,
    SymmetryViolation,
    TruncationError,
)
from .rings import QQ, Poly, PolyRing, SympyFractionField, fraction_str, to_mpq
from .series import INF, TruncSeries, exp_series, polynomial, series

__version__ = "0.1.0"
