"""Exception types shared across the package.

Every failure mode callers are expected to handle gets its own class so that
the CLI can map them onto stable exit codes (validation -> 2, guard -> 3,
internal consistency -> 4).
"""


class MoranError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(MoranError):
    """Defining data (levels, constructions, measures, spec files) is invalid."""


class BadBase(ValidationError):
    """A level has a horizontal or vertical subdivision count below 2."""


class OutOfRangeDigit(ValidationError):
    """A digit (i, j) lies outside the level's n x m grid."""


class TooFewDigits(ValidationError):
    """A level keeps fewer than two cells."""


class ParseError(ValidationError):
    """A spec file could not be parsed."""


class DomainError(MoranError):
    """A numeric argument is outside its mathematical domain."""


class BadRange(MoranError):
    """A depth pair (k, k') does not satisfy k < k'."""


class WindowTooSmall(MoranError):
    """A sweep window or gap limit is too small for the construction."""


class InvalidWord(MoranError):
    """A symbolic word uses a digit not present at its level."""


class InvalidSquare(MoranError):
    """An approximate-square constraint is inconsistent with the construction."""


class FiberCountsNotConstant(MoranError):
    """Occupied rows of some level carry unequal digit counts."""


class AspectOrderViolated(MoranError):
    """A level has n < m where n >= m is required."""


class GuardExceeded(MoranError):
    """A brute-force enumeration would exceed the configured guard limit."""


class InternalCheckFailure(MoranError):
    """A cross-check between independent computation routes failed."""
