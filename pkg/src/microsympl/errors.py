"""Exception hierarchy and the diagnostics record shared by validity checkers."""

from __future__ import annotations

from dataclasses import dataclass


class MicrosymplError(Exception):
    """Base class for every error raised by this package."""


class ShapeError(MicrosymplError):
    """Operands disagree in arity, dimension, or truncation order."""


class FiltrationError(MicrosymplError):
    """A value substituted for a fiber variable has a fiber-degree-zero term."""


class ConvergenceError(MicrosymplError):
    """A fixed-point update changed an already stabilized fiber degree."""


class NormalFormError(MicrosymplError):
    """A generating function violates the normal form S(0, x) = 0."""


class UnsupportedCoreError(MicrosymplError):
    """Germ extraction or inversion requested outside the affine-invertible core class."""


class ValidityError(MicrosymplError):
    """Data fails a geometric validity requirement (isotropy, symplecticity)."""


class InternalInvariantError(MicrosymplError):
    """An internally guaranteed property failed; reaching this signals a bug."""


class ParseError(MicrosymplError):
    """Malformed text input; carries the offending line and column when known."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "")
            message = f"{where}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class CheckResult:
    """Boolean verdict plus human-readable reasons for a failed check."""

    ok: bool
    reasons: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.ok

    def describe(self) -> str:
        if self.ok:
            return "ok"
        return "; ".join(self.reasons) if self.reasons else "failed"
