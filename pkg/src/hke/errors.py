"""Exception hierarchy shared by every module in the package."""

from __future__ import annotations


class HkeError(Exception):
    """Base class for all library errors."""


class ParseError(HkeError):
    """Malformed input text; carries the offending line (and column if known)."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        location = ""
        if line is not None:
            location = f" (line {line}" + (f", column {column}" if column is not None else "") + ")"
        super().__init__(message + location)
        self.line = line
        self.column = column


class DuplicateSet(HkeError):
    """Two member sets of a family are equal."""


class EmptySet(HkeError):
    """A member set is empty."""


class EmptyFamily(HkeError):
    """A family has no members."""


class UniverseTooLarge(HkeError):
    """The ground universe exceeds the fixed capacity."""


class EmptySelector(HkeError):
    """An operation requires a non-empty subcollection selector."""


class OverlappingSelectors(HkeError):
    """Two selectors that must be disjoint share a member."""


class IndexOutOfRange(HkeError):
    """A member index or selector bit falls outside the family."""


class UnknownLabel(HkeError):
    """A label does not occur in the universe at hand."""


class NotRelevant(HkeError):
    """Member sets do not share a single cardinality."""

    def __init__(self, message: str, first: int | None = None, second: int | None = None):
        super().__init__(message)
        self.first = first
        self.second = second


class NotHke(HkeError):
    """The input family fails the hereditary KE property; carries the verdict."""

    def __init__(self, message: str, verdict=None):
        super().__init__(message)
        self.verdict = verdict


class NotMaximal(HkeError):
    """The input family is not a maximal hke collection."""


class NotASubset(HkeError):
    """A set that must lie inside a member does not."""


class TooLarge(HkeError):
    """Input exceeds an exhaustive-search size guard."""


class TooSmall(HkeError):
    """Input is below the minimum size an operation needs."""


class AlphaOutOfRange(HkeError):
    """A requested common cardinality is outside the supported range."""


class AlphaMismatch(HkeError):
    """Two families that must share a common cardinality do not."""


class SelfLoop(HkeError):
    """An edge joins a vertex to itself."""


class DuplicateEdge(HkeError):
    """An edge is declared twice."""


class PreconditionFailed(HkeError):
    """A stated precondition of the operation does not hold for the input."""


class TheoremViolation(HkeError):
    """Two provably equivalent computations disagreed; signals a bug."""


class RangeError(HkeError):
    """Counting parameters violate alpha <= n <= 2*alpha (or n >= 1)."""


class BudgetExceeded(HkeError):
    """A counting search exceeds its fixed budget."""


class CoreTooSmall(HkeError):
    """The shared core of the family is smaller than the amount to strip."""
