"""Error types shared across the toolkit.

Every failure raised by the library is a ``CodecError`` subclass, so callers
can catch one base type at the boundary (the CLI does exactly that).
"""

from __future__ import annotations

from dataclasses import dataclass


class CodecError(Exception):
    """Base class for all toolkit errors."""


class CapacityError(CodecError):
    """Requested buffer capacity exceeds the configured hard cap."""


class BoundsError(CodecError):
    """Cursor arithmetic or buffer-space violation."""


class ValueWidthError(CodecError):
    """Value does not fit the declared bit width."""


class ConstraintError(CodecError):
    """Value violates a schema constraint (range, size, alphabet, ...)."""


class ShapeError(CodecError):
    """Value tree does not match the shape expected by a plan."""


class DecodeError(CodecError):
    """Structural decode failure: bad determinant, missing terminator, ..."""


class PlanFormatError(CodecError):
    """A serialized codec plan is malformed or violates plan invariants."""


@dataclass(frozen=True)
class Diagnostic:
    """A located message from the frontend or the compiler."""

    message: str
    line: int = 0
    col: int = 0

    def render(self, filename: str = "<input>") -> str:
        if self.line:
            return f"{filename}:{self.line}:{self.col}: {self.message}"
        return f"{filename}: {self.message}"


class DiagnosticError(CodecError):
    """Carries one or more diagnostics from parsing, resolution or compilation."""

    def __init__(self, diagnostics: list[Diagnostic] | Diagnostic | str):
        if isinstance(diagnostics, str):
            diagnostics = [Diagnostic(diagnostics)]
        elif isinstance(diagnostics, Diagnostic):
            diagnostics = [diagnostics]
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(d.message for d in self.diagnostics))
