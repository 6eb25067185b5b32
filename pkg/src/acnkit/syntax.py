"""AST for the supported ASN.1 subset and its companion ACN notation.

Source spans ride along for diagnostics but are excluded from equality, so
parse -> print -> parse fixpoint checks compare structure only.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Span:
    line: int = 0
    col: int = 0


NO_SPAN = Span()


def _span_field() -> Span:
    return field(compare=False, default=NO_SPAN)  # type: ignore[return-value]


# ---------------------------------------------------------------------------
# ASN.1 types
# ---------------------------------------------------------------------------


class AsnType:
    """Base class for ASN.1 type expressions."""

    span: Span


@dataclass
class IntegerType(AsnType):
    value_range: tuple[int, int] | None = None
    span: Span = _span_field()


@dataclass
class BooleanType(AsnType):
    span: Span = _span_field()


@dataclass
class EnumItem:
    name: str
    value: int | None = None
    span: Span = _span_field()


@dataclass
class EnumeratedType(AsnType):
    items: list[EnumItem] = field(default_factory=list)
    span: Span = _span_field()


@dataclass
class IA5StringType(AsnType):
    size_range: tuple[int, int] | None = None
    alphabet: str | None = None
    span: Span = _span_field()


@dataclass
class NullType(AsnType):
    span: Span = _span_field()


@dataclass
class RealType(AsnType):
    span: Span = _span_field()


@dataclass
class SequenceField:
    name: str
    ty: AsnType
    optional: bool = False
    span: Span = _span_field()


@dataclass
class SequenceType(AsnType):
    fields: list[SequenceField] = field(default_factory=list)
    span: Span = _span_field()


@dataclass
class ChoiceAlternative:
    name: str
    ty: AsnType
    span: Span = _span_field()


@dataclass
class ChoiceType(AsnType):
    alternatives: list[ChoiceAlternative] = field(default_factory=list)
    # (type name, param name) pairs, populated from the ACN side at resolve time
    formal_params: list[tuple[str, str]] = field(default_factory=list)
    span: Span = _span_field()


@dataclass
class SequenceOfType(AsnType):
    size_range: tuple[int, int] | None
    element: AsnType
    span: Span = _span_field()


@dataclass
class ReferenceType(AsnType):
    name: str
    actual_args: list[str] = field(default_factory=list)
    span: Span = _span_field()


@dataclass
class TypeAssignment:
    name: str
    ty: AsnType
    span: Span = _span_field()


@dataclass
class AsnModule:
    name: str
    assignments: list[TypeAssignment] = field(default_factory=list)
    span: Span = _span_field()

    def assignment(self, name: str) -> TypeAssignment | None:
        for a in self.assignments:
            if a.name == name:
                return a
        return None


# ---------------------------------------------------------------------------
# ACN declarations
# ---------------------------------------------------------------------------

ENCODINGS = ("pos-int", "twos-complement", "IEEE754-1985-32", "IEEE754-1985-64", "ASCII")
ALIGN_UNITS = {"byte": 8, "word": 16, "dword": 32}


@dataclass
class AcnProps:
    """Encoding properties from one bracket group; unset fields mean default."""

    size_bits: int | None = None
    size_ref: str | None = None
    size_null_terminated: bool = False
    termination_pattern: bytes | None = None
    encoding: str | None = None
    endianness: str | None = None
    align: int | None = None
    determinant: str | None = None
    present_when: str | None = None
    span: Span = _span_field()

    def is_default(self) -> bool:
        return self == AcnProps()


@dataclass
class AcnChild:
    """One item of an ACN children block.

    An inserted field carries ``inserted_type``; a child naming an existing
    ASN.1 field or CHOICE alternative does not.
    """

    name: str
    props: AcnProps = field(default_factory=AcnProps)
    inserted_type: str | None = None
    actual_args: list[str] = field(default_factory=list)
    children: list["AcnChild"] | None = None
    span: Span = _span_field()


@dataclass
class AcnEntry:
    type_name: str
    formal_params: list[tuple[str, str]] = field(default_factory=list)
    props: AcnProps = field(default_factory=AcnProps)
    children: list[AcnChild] | None = None
    span: Span = _span_field()


@dataclass
class AcnSpec:
    entries: list[AcnEntry] = field(default_factory=list)
    module_name: str | None = None

    def entry(self, type_name: str) -> AcnEntry | None:
        for e in self.entries:
            if e.type_name == type_name:
                return e
        return None
