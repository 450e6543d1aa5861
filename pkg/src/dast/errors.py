"""Exception hierarchy shared by every dast module."""

from __future__ import annotations


class DastError(Exception):
    """Base class for all errors raised by dast."""


class LogicError(DastError, ValueError):
    """A rule base is malformed or inconsistent."""


class DSLSyntaxError(LogicError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        where = f"line {line}, column {column}: " if line else ""
        super().__init__(f"{where}{message}")
        self.message = message


class UndeclaredSymbolError(LogicError):
    pass


class CyclicBindingError(LogicError):
    pass


class RangeRestrictionError(LogicError):
    pass


class QuantizationError(DastError, ValueError):
    pass


class DerivationError(DastError):
    pass


class LimitExceeded(DerivationError):
    """Raised when a derivation trips one of its guards.

    The partially built lattice is kept on ``lattice`` so callers can still
    inspect or serialize it.
    """

    def __init__(self, message: str, lattice):
        super().__init__(message)
        self.lattice = lattice


class DataSchemaError(DastError, ValueError):
    """Input data (CSV / JSON) does not follow the expected schema."""
