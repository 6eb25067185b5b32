"""Generic runtime value tree plus its JSON text notation.

Notation: records are objects, CHOICE values are single-key objects naming
the alternative, SEQUENCE OF are arrays, NULL is null, integers are numbers,
booleans are booleans, strings are strings, and REAL values are
``{"pattern": "<hex of the IEEE-754 word>", "width": 32 | 64}``.

Parsing is schema-free: every object becomes a record; the engine reshapes
records into variants/reals and strings into enumeration items where the
plan demands them.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import Diagnostic, DiagnosticError

I64_MIN, I64_MAX = -(1 << 63), (1 << 63) - 1


class Value:
    """Base class for all runtime values."""

    __slots__ = ()


@dataclass(frozen=True)
class IntV(Value):
    value: int


@dataclass(frozen=True)
class BoolV(Value):
    value: bool


@dataclass(frozen=True)
class EnumV(Value):
    name: str


@dataclass(frozen=True)
class StrV(Value):
    data: bytes


@dataclass(frozen=True)
class NullV(Value):
    pass


@dataclass(frozen=True)
class RealV(Value):
    pattern: int
    width: int


@dataclass(frozen=True)
class RecordV(Value):
    fields: tuple[tuple[str, Value], ...]

    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.fields)

    def get(self, name: str) -> Value | None:
        for field_name, value in self.fields:
            if field_name == name:
                return value
        return None


@dataclass(frozen=True)
class VariantV(Value):
    name: str
    value: Value


@dataclass(frozen=True)
class ListV(Value):
    items: tuple[Value, ...]


def record(*fields: tuple[str, Value]) -> RecordV:
    return RecordV(tuple(fields))


def render_value(text: str) -> Value:
    """Parse the JSON value notation into a raw value tree."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise DiagnosticError(Diagnostic(e.msg, e.lineno, e.colno)) from None
    return value_from_obj(obj)


def value_from_obj(obj: object) -> Value:
    if obj is None:
        return NullV()
    if isinstance(obj, bool):
        return BoolV(obj)
    if isinstance(obj, int):
        if not I64_MIN <= obj <= I64_MAX:
            raise DiagnosticError(f"integer {obj} outside the signed 64-bit range")
        return IntV(obj)
    if isinstance(obj, float):
        raise DiagnosticError(
            "JSON floats are not accepted; spell REAL values as "
            '{"pattern": "<hex>", "width": 32|64}'
        )
    if isinstance(obj, str):
        try:
            return StrV(obj.encode("ascii"))
        except UnicodeEncodeError:
            raise DiagnosticError(f"non-ASCII string {obj!r}") from None
    if isinstance(obj, list):
        return ListV(tuple(value_from_obj(item) for item in obj))
    if isinstance(obj, dict):
        return RecordV(tuple((name, value_from_obj(item)) for name, item in obj.items()))
    raise DiagnosticError(f"unsupported JSON value {obj!r}")


def print_value(value: Value, indent: int | None = 2) -> str:
    """Render a value tree in the JSON notation (inverse of render_value)."""
    return json.dumps(value_to_obj(value), indent=indent)


def value_to_obj(value: Value) -> object:
    if isinstance(value, NullV):
        return None
    if isinstance(value, BoolV):
        return value.value
    if isinstance(value, IntV):
        return value.value
    if isinstance(value, EnumV):
        return value.name
    if isinstance(value, StrV):
        return value.data.decode("ascii")
    if isinstance(value, RealV):
        return {"pattern": f"{value.pattern:0{value.width // 4}x}", "width": value.width}
    if isinstance(value, ListV):
        return [value_to_obj(item) for item in value.items]
    if isinstance(value, RecordV):
        return {name: value_to_obj(item) for name, item in value.fields}
    if isinstance(value, VariantV):
        return {value.name: value_to_obj(value.value)}
    raise TypeError(f"unknown value node {value!r}")
