"""Exception hierarchy.

Every error renders as ``<ClassName>: <message>`` so that CLI output always
carries the error name.
"""

from __future__ import annotations

__all__ = [
    "WsgError",
    "GraphValidationError",
    "DuplicateEdge",
    "SelfLoop",
    "NonPositiveWeight",
    "NonPositiveMeasure",
    "NegativePotential",
    "Disconnected",
    "SparseIds",
    "InvalidRoot",
    "MismatchedLayering",
    "RadiusOutOfRange",
    "ZeroBoundary",
    "SizeOverflow",
    "BalanceViolation",
    "SizeCapExceeded",
    "ConvergenceFailure",
    "IndexOutOfRange",
    "DimensionMismatch",
    "NonPositiveKernel",
    "NotComparable",
    "ParseError",
]


class WsgError(Exception):
    """Base class for all library errors."""

    def __str__(self) -> str:
        msg = super().__str__()
        return f"{type(self).__name__}: {msg}" if msg else type(self).__name__


# graph construction / layering
class GraphValidationError(WsgError):
    pass


class DuplicateEdge(GraphValidationError):
    pass


class SelfLoop(GraphValidationError):
    pass


class NonPositiveWeight(GraphValidationError):
    pass


class NonPositiveMeasure(GraphValidationError):
    pass


class NegativePotential(GraphValidationError):
    pass


class Disconnected(GraphValidationError):
    pass


class SparseIds(GraphValidationError):
    pass


class InvalidRoot(WsgError):
    pass


class MismatchedLayering(WsgError):
    pass


# profiles
class RadiusOutOfRange(WsgError):
    pass


class ZeroBoundary(WsgError):
    pass


class SizeOverflow(WsgError):
    pass


class BalanceViolation(WsgError):
    pass


# numerics
class SizeCapExceeded(WsgError):
    pass


class ConvergenceFailure(WsgError):
    pass


class IndexOutOfRange(WsgError):
    pass


class DimensionMismatch(WsgError):
    pass


class NonPositiveKernel(WsgError):
    pass


class NotComparable(WsgError):
    pass


# file formats
class ParseError(WsgError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
