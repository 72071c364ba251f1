"""Exception types raised across the analyzer."""

from __future__ import annotations


class PdcfaError(Exception):
    """Base class for every error the analyzer raises on bad input."""


class SExprError(PdcfaError):
    """Malformed s-expression text (unbalanced parens, stray tokens)."""

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        self.line = line
        self.col = col
        where = f"{line}:{col}: " if line is not None else ""
        super().__init__(where + message)


class NotANF(SExprError):
    """Well-formed s-expression that is outside the A-Normal Form grammar."""


class OpenProgram(PdcfaError):
    def __init__(self, free):
        self.free = free
        names = ", ".join(sorted(v.name for v in free))
        super().__init__(f"program has free variables: {names}")


class UnboundVariable(PdcfaError):
    pass


class DanglingAddress(PdcfaError):
    pass


class UncoveredAddress(PdcfaError):
    pass


class UnknownVariable(PdcfaError):
    pass


class UnknownLabel(PdcfaError):
    pass


class UnknownState(PdcfaError):
    pass


class LimitExceeded(PdcfaError):
    """A fixpoint computation hit its node/edge budget.

    ``partial`` holds whatever graphs had been built; they are unsound
    (incomplete) and only useful for debugging.
    """

    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial
