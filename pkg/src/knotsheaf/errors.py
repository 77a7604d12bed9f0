"""Exception hierarchy shared by every module."""

from __future__ import annotations


class KnotSheafError(Exception):
    """Base class for all library errors."""


class FieldMismatchError(KnotSheafError, TypeError):
    """Arithmetic attempted between elements of different fields."""


class DimensionError(KnotSheafError, ValueError):
    """Matrix or vector shapes are incompatible."""


class PDCodeError(KnotSheafError, ValueError):
    """A planar-diagram code is malformed or does not describe a knot."""


class WordSyntaxError(KnotSheafError, ValueError):
    """A textual group word could not be parsed."""


class NotInvariantError(KnotSheafError, ValueError):
    """A subspace is not preserved by the representation."""


class InvalidSheafError(KnotSheafError, ValueError):
    """Gluing data violates the compatibility conditions."""


class NotSimpleError(KnotSheafError, ValueError):
    """An operation requiring a simple sheaf received a non-simple one."""


class NotKCHError(KnotSheafError, ValueError):
    """A representation is not of KCH type."""


class VerificationError(KnotSheafError, ValueError):
    """Augmentation data failed verification."""


class BudgetExceeded(KnotSheafError, RuntimeError):
    """An exhaustive search would exceed its candidate budget."""


class ConsistencyError(KnotSheafError, AssertionError):
    """Two independent computations that must agree did not."""
