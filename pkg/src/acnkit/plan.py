"""Compiled codec plans: immutable instruction trees the engine interprets.

Every node carries static size bounds and an alignment class.  Slot names
reference determinant producer fields that are encoded earlier; plan loading
re-validates that ordering.  The dump format is canonical JSON with a stable
field order so identical compilations diff cleanly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import PlanFormatError

ALIGNMENT_NAMES = {0: "none", 8: "mod8", 16: "mod16", 32: "mod32"}
ALIGNMENT_VALUES = {v: k for k, v in ALIGNMENT_NAMES.items()}


@dataclass(frozen=True)
class SizeBounds:
    min_bits: int
    max_bits: int
    alignment: int = 0  # 0 none, else 8 | 16 | 32

    def to_obj(self) -> dict:
        return {
            "min_bits": self.min_bits,
            "max_bits": self.max_bits,
            "alignment": ALIGNMENT_NAMES[self.alignment],
        }


def exact(bits: int, alignment: int = 0) -> SizeBounds:
    return SizeBounds(bits, bits, alignment)


def join_alignment(*alignments: int) -> int:
    return max(alignments) if alignments else 0


# ---------------------------------------------------------------------------
# Constraint payloads
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IntRangeCheck:
    lo: int
    hi: int


@dataclass(frozen=True)
class SizeRangeCheck:
    lo: int
    hi: int


@dataclass(frozen=True)
class AlphabetCheck:
    chars: str


Check = IntRangeCheck | SizeRangeCheck | AlphabetCheck


# ---------------------------------------------------------------------------
# Plan nodes
# ---------------------------------------------------------------------------


class PlanNode:
    """Base class for plan nodes; all concrete nodes are frozen dataclasses."""

    bounds: SizeBounds


@dataclass(frozen=True)
class UIntAligned(PlanNode):
    width: int  # 8 | 16 | 32 | 64
    endianness: str
    bounds: SizeBounds


@dataclass(frozen=True)
class UIntBits(PlanNode):
    n_bits: int
    bounds: SizeBounds


@dataclass(frozen=True)
class IntTwos(PlanNode):
    n_bits: int
    aligned: bool
    bounds: SizeBounds


@dataclass(frozen=True)
class ConstrainedInt(PlanNode):
    lo: int
    hi: int
    bounds: SizeBounds


@dataclass(frozen=True)
class Real(PlanNode):
    width: int
    endianness: str
    bounds: SizeBounds


@dataclass(frozen=True)
class Bool(PlanNode):
    bounds: SizeBounds


@dataclass(frozen=True)
class Null(PlanNode):
    bounds: SizeBounds


@dataclass(frozen=True)
class Enumerated(PlanNode):
    items: tuple[tuple[str, int], ...]  # (name, wire value)
    n_bits: int
    bounds: SizeBounds


@dataclass(frozen=True)
class StringAsciiNull(PlanNode):
    min_len: int
    max_len: int
    pattern: bytes
    bounds: SizeBounds


@dataclass(frozen=True)
class StringCharIndex(PlanNode):
    alphabet: str
    min_len: int
    max_len: int
    size_slot: str | None  # external length determinant; None = internal field
    bounds: SizeBounds


@dataclass(frozen=True)
class Align(PlanNode):
    to: int  # 8 | 16 | 32
    inner: PlanNode
    bounds: SizeBounds


@dataclass(frozen=True)
class ConstraintCheck(PlanNode):
    checks: tuple[Check, ...]
    inner: PlanNode
    bounds: SizeBounds


@dataclass(frozen=True)
class RecordField:
    name: str
    node: PlanNode
    acn: bool = False
    optional: bool = False
    present_when: str | None = None


@dataclass(frozen=True)
class Record(PlanNode):
    fields: tuple[RecordField, ...]
    bounds: SizeBounds


@dataclass(frozen=True)
class Variant(PlanNode):
    determinant_slot: str | None  # None = inline index determinant
    alternatives: tuple[tuple[str, PlanNode], ...]
    bounds: SizeBounds


@dataclass(frozen=True)
class List(PlanNode):
    lo: int
    hi: int
    size_slot: str | None  # None = inline length determinant
    element: PlanNode
    bounds: SizeBounds


@dataclass(frozen=True)
class Outlined(PlanNode):
    name: str
    param_slots: tuple[tuple[str, str], ...]  # (param name, argument field)
    inner: PlanNode
    bounds: SizeBounds


@dataclass(frozen=True)
class CodecPlan:
    type_name: str
    root: PlanNode

    @property
    def bounds(self) -> SizeBounds:
        return self.root.bounds


# ---------------------------------------------------------------------------
# Dump
# ---------------------------------------------------------------------------


def plan_dump(plan: CodecPlan) -> str:
    obj = {"type_name": plan.type_name, "root": _node_to_obj(plan.root)}
    return json.dumps(obj, indent=2) + "\n"


def _check_to_obj(check: Check) -> dict:
    if isinstance(check, IntRangeCheck):
        return {"type": "int-range", "low": check.lo, "high": check.hi}
    if isinstance(check, SizeRangeCheck):
        return {"type": "size-range", "low": check.lo, "high": check.hi}
    if isinstance(check, AlphabetCheck):
        return {"type": "alphabet", "chars": check.chars}
    raise TypeError(f"unknown check {check!r}")


def _node_to_obj(node: PlanNode) -> dict:
    if isinstance(node, UIntAligned):
        out: dict = {"kind": "const-uint", "width": node.width,
                     "endianness": node.endianness}
    elif isinstance(node, UIntBits):
        out = {"kind": "uint-bits", "n_bits": node.n_bits}
    elif isinstance(node, IntTwos):
        out = {"kind": "twos-complement", "n_bits": node.n_bits,
               "aligned": node.aligned}
    elif isinstance(node, ConstrainedInt):
        out = {"kind": "constrained-int", "low": node.lo, "high": node.hi}
    elif isinstance(node, Real):
        out = {"kind": "real", "width": node.width, "endianness": node.endianness}
    elif isinstance(node, Bool):
        out = {"kind": "bool"}
    elif isinstance(node, Null):
        out = {"kind": "null"}
    elif isinstance(node, Enumerated):
        out = {"kind": "enumerated",
               "items": [{"name": n, "value": v} for n, v in node.items],
               "n_bits": node.n_bits}
    elif isinstance(node, StringAsciiNull):
        out = {"kind": "string-ascii-null", "min_len": node.min_len,
               "max_len": node.max_len, "pattern": node.pattern.hex()}
    elif isinstance(node, StringCharIndex):
        out = {"kind": "string-char-index", "alphabet": node.alphabet,
               "min_len": node.min_len, "max_len": node.max_len,
               "size_slot": node.size_slot}
    elif isinstance(node, Align):
        out = {"kind": "align", "to": node.to, "inner": _node_to_obj(node.inner)}
    elif isinstance(node, ConstraintCheck):
        out = {"kind": "constraint-check",
               "checks": [_check_to_obj(c) for c in node.checks],
               "inner": _node_to_obj(node.inner)}
    elif isinstance(node, Record):
        out = {"kind": "record", "fields": [
            {"name": f.name, "acn": f.acn, "optional": f.optional,
             "present_when": f.present_when, "node": _node_to_obj(f.node)}
            for f in node.fields]}
    elif isinstance(node, Variant):
        out = {"kind": "variant", "determinant_slot": node.determinant_slot,
               "alternatives": [{"name": n, "node": _node_to_obj(t)}
                                for n, t in node.alternatives]}
    elif isinstance(node, List):
        out = {"kind": "list", "low": node.lo, "high": node.hi,
               "size_slot": node.size_slot, "element": _node_to_obj(node.element)}
    elif isinstance(node, Outlined):
        out = {"kind": "outlined", "name": node.name,
               "param_slots": [{"param": p, "arg": a} for p, a in node.param_slots],
               "inner": _node_to_obj(node.inner)}
    else:
        raise TypeError(f"unknown plan node {node!r}")
    out["bounds"] = node.bounds.to_obj()
    return out


# ---------------------------------------------------------------------------
# Load
# ---------------------------------------------------------------------------


def plan_load(text: str) -> CodecPlan:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise PlanFormatError(f"not valid JSON: {e}") from None
    if not isinstance(obj, dict) or "type_name" not in obj or "root" not in obj:
        raise PlanFormatError("plan document needs type_name and root")
    root = _node_from_obj(obj["root"], where="root")
    plan = CodecPlan(str(obj["type_name"]), root)
    validate_plan(plan)
    return plan


def _field_of(obj: dict, key: str, kinds: type | tuple, where: str) -> object:
    if key not in obj:
        raise PlanFormatError(f"{where}: missing {key!r}")
    value = obj[key]
    if not isinstance(value, kinds) or (isinstance(value, bool) and kinds is int):
        raise PlanFormatError(f"{where}: bad type for {key!r}")
    return value


def _check_from_obj(obj: dict, where: str) -> Check:
    kind = _field_of(obj, "type", str, where)
    if kind == "int-range":
        return IntRangeCheck(_field_of(obj, "low", int, where),
                             _field_of(obj, "high", int, where))
    if kind == "size-range":
        return SizeRangeCheck(_field_of(obj, "low", int, where),
                              _field_of(obj, "high", int, where))
    if kind == "alphabet":
        return AlphabetCheck(_field_of(obj, "chars", str, where))
    raise PlanFormatError(f"{where}: unknown check type {kind!r}")


def _bounds_from_obj(obj: dict, where: str) -> SizeBounds:
    raw = _field_of(obj, "bounds", dict, where)
    min_bits = _field_of(raw, "min_bits", int, where)
    max_bits = _field_of(raw, "max_bits", int, where)
    name = _field_of(raw, "alignment", str, where)
    if name not in ALIGNMENT_VALUES:
        raise PlanFormatError(f"{where}: unknown alignment class {name!r}")
    if not 0 <= min_bits <= max_bits:
        raise PlanFormatError(f"{where}: inconsistent bounds {min_bits}..{max_bits}")
    return SizeBounds(min_bits, max_bits, ALIGNMENT_VALUES[name])


def _node_from_obj(obj: object, where: str) -> PlanNode:
    if not isinstance(obj, dict):
        raise PlanFormatError(f"{where}: node must be an object")
    kind = _field_of(obj, "kind", str, where)
    bounds = _bounds_from_obj(obj, where)
    if kind == "const-uint":
        width = _field_of(obj, "width", int, where)
        if width not in (8, 16, 32, 64):
            raise PlanFormatError(f"{where}: bad const-uint width {width}")
        return UIntAligned(width, str(_field_of(obj, "endianness", str, where)), bounds)
    if kind == "uint-bits":
        n = _field_of(obj, "n_bits", int, where)
        if not 1 <= n <= 64:
            raise PlanFormatError(f"{where}: bad bit width {n}")
        return UIntBits(n, bounds)
    if kind == "twos-complement":
        n = _field_of(obj, "n_bits", int, where)
        if not 1 <= n <= 64:
            raise PlanFormatError(f"{where}: bad bit width {n}")
        return IntTwos(n, bool(obj.get("aligned", False)), bounds)
    if kind == "constrained-int":
        lo = _field_of(obj, "low", int, where)
        hi = _field_of(obj, "high", int, where)
        if lo > hi:
            raise PlanFormatError(f"{where}: empty range {lo}..{hi}")
        return ConstrainedInt(lo, hi, bounds)
    if kind == "real":
        width = _field_of(obj, "width", int, where)
        endianness = _field_of(obj, "endianness", str, where)
        if width not in (32, 64) or endianness not in ("big", "little"):
            raise PlanFormatError(f"{where}: bad real layout")
        return Real(width, str(endianness), bounds)
    if kind == "bool":
        return Bool(bounds)
    if kind == "null":
        return Null(bounds)
    if kind == "enumerated":
        raw_items = _field_of(obj, "items", list, where)
        items = []
        for it in raw_items:  # type: ignore[union-attr]
            items.append((str(_field_of(it, "name", str, where)),
                          int(_field_of(it, "value", int, where))))
        if not items:
            raise PlanFormatError(f"{where}: empty enumeration")
        n = _field_of(obj, "n_bits", int, where)
        return Enumerated(tuple(items), int(n), bounds)
    if kind == "string-ascii-null":
        pattern = bytes.fromhex(str(_field_of(obj, "pattern", str, where)))
        if not 1 <= len(pattern) <= 8:
            raise PlanFormatError(f"{where}: termination pattern must be 1..8 bytes")
        return StringAsciiNull(int(_field_of(obj, "min_len", int, where)),
                               int(_field_of(obj, "max_len", int, where)),
                               pattern, bounds)
    if kind == "string-char-index":
        slot = obj.get("size_slot")
        if slot is not None and not isinstance(slot, str):
            raise PlanFormatError(f"{where}: bad size_slot")
        return StringCharIndex(str(_field_of(obj, "alphabet", str, where)),
                               int(_field_of(obj, "min_len", int, where)),
                               int(_field_of(obj, "max_len", int, where)),
                               slot, bounds)
    if kind == "align":
        to = _field_of(obj, "to", int, where)
        if to not in (8, 16, 32):
            raise PlanFormatError(f"{where}: bad alignment {to}")
        return Align(to, _node_from_obj(obj["inner"], f"{where}.inner"), bounds)
    if kind == "constraint-check":
        checks = tuple(_check_from_obj(c, where)
                       for c in _field_of(obj, "checks", list, where))  # type: ignore[union-attr]
        return ConstraintCheck(checks, _node_from_obj(obj["inner"], f"{where}.inner"),
                               bounds)
    if kind == "record":
        fields = []
        for raw in _field_of(obj, "fields", list, where):  # type: ignore[union-attr]
            name = str(_field_of(raw, "name", str, where))
            pw = raw.get("present_when")
            if pw is not None and not isinstance(pw, str):
                raise PlanFormatError(f"{where}.{name}: bad present_when")
            fields.append(RecordField(
                name,
                _node_from_obj(raw["node"], f"{where}.{name}"),
                acn=bool(raw.get("acn", False)),
                optional=bool(raw.get("optional", False)),
                present_when=pw,
            ))
        return Record(tuple(fields), bounds)
    if kind == "variant":
        slot = obj.get("determinant_slot")
        if slot is not None and not isinstance(slot, str):
            raise PlanFormatError(f"{where}: bad determinant_slot")
        alts = []
        for raw in _field_of(obj, "alternatives", list, where):  # type: ignore[union-attr]
            name = str(_field_of(raw, "name", str, where))
            alts.append((name, _node_from_obj(raw["node"], f"{where}.{name}")))
        if not alts:
            raise PlanFormatError(f"{where}: variant needs alternatives")
        return Variant(slot, tuple(alts), bounds)
    if kind == "list":
        slot = obj.get("size_slot")
        if slot is not None and not isinstance(slot, str):
            raise PlanFormatError(f"{where}: bad size_slot")
        lo = _field_of(obj, "low", int, where)
        hi = _field_of(obj, "high", int, where)
        if not 0 <= lo <= hi:
            raise PlanFormatError(f"{where}: bad size range {lo}..{hi}")
        return List(lo, hi, slot,
                    _node_from_obj(obj["element"], f"{where}.element"), bounds)
    if kind == "outlined":
        name = str(_field_of(obj, "name", str, where))
        slots = tuple((str(_field_of(s, "param", str, where)),
                       str(_field_of(s, "arg", str, where)))
                      for s in _field_of(obj, "param_slots", list, where))  # type: ignore[union-attr]
        return Outlined(name, slots,
                        _node_from_obj(obj["inner"], f"{where}.inner"), bounds)
    raise PlanFormatError(f"{where}: unknown node kind {kind!r}")


# ---------------------------------------------------------------------------
# Structural validation
# ---------------------------------------------------------------------------


def validate_plan(plan: CodecPlan) -> None:
    """Check slot ordering, scope visibility and outlined-name coherence."""
    outlined: dict[str, Outlined] = {}
    _validate_node(plan.root, [], plan.type_name, outlined)


class _Scope:
    """Names visible so far: a record frame or an opaque parameter frame."""

    def __init__(self, barrier: bool):
        self.names: set[str] = set()
        self.barrier = barrier


def _slot_visible(scopes: list[_Scope], name: str) -> bool:
    for scope in reversed(scopes):
        if name in scope.names:
            return True
        if scope.barrier:
            return False
    return False


def _validate_slot(scopes: list[_Scope], name: str, where: str) -> None:
    if not _slot_visible(scopes, name):
        raise PlanFormatError(
            f"{where}: slot {name!r} does not reference an earlier-encoded field"
        )


def _validate_node(node: PlanNode, scopes: list[_Scope], where: str,
                   outlined: dict[str, Outlined]) -> None:
    if isinstance(node, (Align, ConstraintCheck)):
        _validate_node(node.inner, scopes, where, outlined)
    elif isinstance(node, Record):
        scopes.append(_Scope(barrier=False))
        for field in node.fields:
            sub = f"{where}.{field.name}"
            if field.present_when is not None:
                if not field.optional:
                    raise PlanFormatError(f"{sub}: present_when on mandatory field")
                _validate_slot(scopes, field.present_when, sub)
            elif field.optional:
                raise PlanFormatError(f"{sub}: optional field without present_when")
            _validate_node(field.node, scopes, sub, outlined)
            scopes[-1].names.add(field.name)
        scopes.pop()
    elif isinstance(node, Variant):
        if node.determinant_slot is not None:
            _validate_slot(scopes, node.determinant_slot, where)
        for name, alt in node.alternatives:
            _validate_node(alt, scopes, f"{where}.{name}", outlined)
    elif isinstance(node, List):
        if node.size_slot is not None:
            _validate_slot(scopes, node.size_slot, where)
        _validate_node(node.element, scopes, f"{where}[]", outlined)
    elif isinstance(node, StringCharIndex):
        if node.size_slot is not None:
            _validate_slot(scopes, node.size_slot, where)
    elif isinstance(node, Outlined):
        known = outlined.get(node.name)
        if known is not None and known != node:
            raise PlanFormatError(
                f"{where}: outlined name {node.name!r} reused with different content"
            )
        outlined[node.name] = node
        frame = _Scope(barrier=True)
        for param, arg in node.param_slots:
            _validate_slot(scopes, arg, f"{where}<{param}>")
            frame.names.add(param)
        scopes.append(frame)
        _validate_node(node.inner, scopes, f"{where}:{node.name}", outlined)
        scopes.pop()
    # leaves need no structural checks beyond construction-time ones
