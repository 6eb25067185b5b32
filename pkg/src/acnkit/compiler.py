"""Resolution of ASN.1 + ACN pairs into executable codec plans.

``resolve`` wires every determinant (`size`, `determinant`, `present-when`)
to a concrete producer field, instantiates parameterized CHOICEs per
argument binding, rejects recursion and unsupported property combinations,
and precomputes one generic plan per type assignment.  ``compile_plan``
then hands out the immutable plan for one assignment, with static size
bounds and alignment classes on every node.

Field references are restricted to siblings and ancestors' siblings; the
producer must be encoded before every consumer in document order.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import plan as P
from .acncodec import bits_needed
from .errors import Diagnostic, DiagnosticError
from .syntax import (
    AcnChild,
    AcnEntry,
    AcnProps,
    AcnSpec,
    AsnModule,
    AsnType,
    BooleanType,
    ChoiceType,
    EnumeratedType,
    IA5StringType,
    IntegerType,
    NullType,
    RealType,
    ReferenceType,
    SequenceOfType,
    SequenceType,
    Span,
)

I64_MIN, I64_MAX = -(1 << 63), (1 << 63) - 1

IA5_CHARS = "".join(chr(c) for c in range(128))


@dataclass
class ResolvedSchema:
    """Determinant-wired type graph with one generic plan per assignment."""

    module: AsnModule
    acn: AcnSpec
    plans: dict[str, P.PlanNode]
    formal_params: dict[str, list[tuple[str, str]]]

    def type_names(self) -> list[str]:
        return [a.name for a in self.module.assignments]


def resolve(module: AsnModule, acn: AcnSpec) -> ResolvedSchema:
    """Resolve an ASN.1 module against its ACN spec; all diagnostics batched."""
    ctx = _Context(module, acn)
    ctx.run()
    if ctx.diags:
        raise DiagnosticError(ctx.diags)
    return ResolvedSchema(module, acn, ctx.plans, ctx.formal_params)


def compile_plan(schema: ResolvedSchema, type_name: str) -> P.CodecPlan:
    """The executable plan for one type assignment of a resolved schema."""
    if type_name not in schema.plans:
        raise DiagnosticError(f"unknown type {type_name!r}")
    if schema.formal_params.get(type_name):
        raise DiagnosticError(
            f"{type_name!r} is parameterized and can only be compiled at a use site"
        )
    plan = P.CodecPlan(type_name, schema.plans[type_name])
    P.validate_plan(plan)
    return plan


def size_bounds(schema: ResolvedSchema, type_name: str) -> P.SizeBounds:
    return compile_plan(schema, type_name).bounds


# ---------------------------------------------------------------------------
# Scopes
# ---------------------------------------------------------------------------


@dataclass
class _ScopeEntry:
    name: str
    category: str  # "int" | "bool" | "enum" | "other"
    type_name: str | None
    enum_items: tuple[tuple[str, int], ...] | None = None
    used: bool = False


class _Frame:
    def __init__(self, barrier: bool):
        self.entries: dict[str, _ScopeEntry] = {}
        self.pending: set[str] = set()
        self.barrier = barrier


def _categorize(node: P.PlanNode) -> tuple[str, tuple | None]:
    while isinstance(node, (P.Align, P.ConstraintCheck)):
        node = node.inner
    if isinstance(node, P.Outlined):
        node = node.inner
        return _categorize(node)
    if isinstance(node, (P.ConstrainedInt, P.UIntAligned, P.UIntBits, P.IntTwos)):
        return "int", None
    if isinstance(node, P.Bool):
        return "bool", None
    if isinstance(node, P.Enumerated):
        return "enum", node.items
    return "other", None


# ---------------------------------------------------------------------------
# Property accounting
# ---------------------------------------------------------------------------

_PROP_KEYS = (
    "size_bits", "size_ref", "size_null_terminated", "termination_pattern",
    "encoding", "endianness", "align", "determinant", "present_when",
)


class _Props:
    """AcnProps wrapper that tracks which properties a builder consumed."""

    def __init__(self, props: AcnProps | None, span: Span):
        self.raw = props or AcnProps()
        self.span = props.span if props and props.span.line else span
        self.consumed: set[str] = set()

    def take(self, key: str):
        self.consumed.add(key)
        return getattr(self.raw, key)

    def peek(self, key: str):
        return getattr(self.raw, key)

    def leftovers(self) -> list[str]:
        out = []
        defaults = AcnProps()
        for key in _PROP_KEYS:
            if key in self.consumed:
                continue
            if getattr(self.raw, key) != getattr(defaults, key):
                out.append(key.replace("_", "-"))
        return out


# ---------------------------------------------------------------------------
# Resolution context
# ---------------------------------------------------------------------------


class _Context:
    def __init__(self, module: AsnModule, acn: AcnSpec):
        self.module = module
        self.acn = acn
        self.diags: list[Diagnostic] = []
        self.assignments = {a.name: a for a in module.assignments}
        self.entries: dict[str, AcnEntry] = {}
        self.plans: dict[str, P.PlanNode] = {}
        self.formal_params: dict[str, list[tuple[str, str]]] = {}

    def error(self, message: str, span: Span) -> None:
        self.diags.append(Diagnostic(message, span.line, span.col))

    def run(self) -> None:
        for entry in self.acn.entries:
            if entry.type_name not in self.assignments:
                self.error(
                    f"ACN entry {entry.type_name!r} has no ASN.1 type", entry.span
                )
            else:
                self.entries[entry.type_name] = entry
        if self.diags:
            return
        order = self._build_order()
        if order is None:
            return
        for name in order:
            entry = self.entries.get(name)
            self.formal_params[name] = list(entry.formal_params) if entry else []
        for name in order:
            try:
                builder = _Builder(self, name)
                self.plans[name] = builder.build()
            except DiagnosticError as e:
                self.diags.extend(e.diagnostics)

    def _dependencies(self, name: str) -> list[tuple[str, Span]]:
        deps: list[tuple[str, Span]] = []

        def walk_type(ty: AsnType) -> None:
            if isinstance(ty, ReferenceType):
                deps.append((ty.name, ty.span))
            elif isinstance(ty, SequenceType):
                for f in ty.fields:
                    walk_type(f.ty)
            elif isinstance(ty, ChoiceType):
                for alt in ty.alternatives:
                    walk_type(alt.ty)
            elif isinstance(ty, SequenceOfType):
                walk_type(ty.element)

        def walk_children(children: list[AcnChild] | None) -> None:
            if not children:
                return
            for child in children:
                if child.inserted_type:
                    deps.append((child.inserted_type, child.span))
                walk_children(child.children)

        walk_type(self.assignments[name].ty)
        entry = self.entries.get(name)
        if entry:
            for ptype, _ in entry.formal_params:
                deps.append((ptype, entry.span))
            walk_children(entry.children)
        return deps

    def _build_order(self) -> list[str] | None:
        """Topological order over the reference graph; rejects recursion."""
        color: dict[str, int] = {}  # 0 visiting, 1 done
        order: list[str] = []
        ok = True

        def visit(name: str, via: Span) -> None:
            nonlocal ok
            if name not in self.assignments:
                self.error(f"unresolved reference to {name!r}", via)
                ok = False
                return
            state = color.get(name)
            if state == 1:
                return
            if state == 0:
                self.error(f"recursive type {name!r} is not supported", via)
                ok = False
                return
            color[name] = 0
            for dep, span in self._dependencies(name):
                visit(dep, span)
            color[name] = 1
            order.append(name)

        for a in self.module.assignments:
            visit(a.name, a.span)
        return order if ok else None


# ---------------------------------------------------------------------------
# Per-assignment builder
# ---------------------------------------------------------------------------


class _Builder:
    def __init__(self, ctx: _Context, name: str):
        self.ctx = ctx
        self.name = name
        self.assignment = ctx.assignments[name]
        self.entry = ctx.entries.get(name)
        self.frames: list[_Frame] = []
        self.outlined: dict[tuple, P.Outlined] = {}

    def fail(self, message: str, span: Span) -> DiagnosticError:
        return DiagnosticError(Diagnostic(message, span.line, span.col))

    def build(self) -> P.PlanNode:
        entry = self.entry
        root_ty = self.assignment.ty
        span = self.assignment.span
        if entry and entry.formal_params:
            if not isinstance(root_ty, ChoiceType):
                raise self.fail(
                    "parameters are only supported on CHOICE types", entry.span
                )
            frame = _Frame(barrier=True)
            for ptype, pname in entry.formal_params:
                items = self._param_enum_items(ptype, entry.span)
                frame.entries[pname] = _ScopeEntry(pname, "enum", ptype, items)
            self.frames.append(frame)
        props = _Props(entry.props if entry else None, span)
        children = entry.children if entry else None
        node = self.build_type(root_ty, props, children, [], self.name, span)
        self._finish_props(props, f"type {self.name}")
        if entry and entry.formal_params:
            for pname, pentry in self.frames[0].entries.items():
                if not pentry.used:
                    raise self.fail(f"parameter {pname!r} is never used", entry.span)
        return node

    def _param_enum_items(self, ptype: str, span: Span) -> tuple[tuple[str, int], ...]:
        if ptype not in self.ctx.plans:
            raise self.fail(f"unresolved parameter type {ptype!r}", span)
        category, items = _categorize(self.ctx.plans[ptype])
        if category != "enum" or items is None:
            raise self.fail(
                f"parameter type {ptype!r} must be an ENUMERATED assignment", span
            )
        return items

    def _finish_props(self, props: _Props, where: str) -> None:
        leftovers = props.leftovers()
        if leftovers:
            raise self.fail(
                f"{where}: unsupported property combination: {', '.join(leftovers)}",
                props.span,
            )

    # -- reference lookup ------------------------------------------------

    def resolve_ref(
        self,
        ref: str,
        span: Span,
        expect_category: str,
        expect_type: str | None = None,
        purpose: str = "reference",
    ) -> _ScopeEntry:
        if "." in ref:
            raise self.fail(
                f"{purpose} {ref!r}: only sibling and ancestor-sibling "
                "references are supported",
                span,
            )
        for frame in reversed(self.frames):
            entry = frame.entries.get(ref)
            if entry is not None:
                if entry.category != expect_category:
                    raise self.fail(
                        f"{purpose} {ref!r} must be a {expect_category} field, "
                        f"found {entry.category}",
                        span,
                    )
                if expect_type is not None and entry.type_name != expect_type:
                    raise self.fail(
                        f"{purpose} {ref!r} has type {entry.type_name or '<inline>'}, "
                        f"expected {expect_type}",
                        span,
                    )
                entry.used = True
                return entry
            if ref in frame.pending:
                raise self.fail(
                    f"{purpose} {ref!r} is consumed before it is encoded", span
                )
            if frame.barrier:
                break
        raise self.fail(f"unresolved {purpose} {ref!r}", span)

    # -- type dispatch -----------------------------------------------------

    def build_type(
        self,
        ty: AsnType,
        props: _Props,
        children: list[AcnChild] | None,
        args: list[str],
        path: str,
        span: Span,
    ) -> P.PlanNode:
        if isinstance(ty, ReferenceType):
            if children is not None:
                raise self.fail(
                    "ACN children are not supported on reference fields", span
                )
            node = self.build_reference(ty, props, args, path)
        else:
            if args:
                raise self.fail("arguments are only valid on type references", span)
            if isinstance(ty, IntegerType):
                node = self.build_integer(ty, props)
            elif isinstance(ty, BooleanType):
                node = P.Bool(P.exact(1))
            elif isinstance(ty, NullType):
                node = P.Null(P.exact(0))
            elif isinstance(ty, RealType):
                node = self.build_real(ty, props)
            elif isinstance(ty, EnumeratedType):
                node = self.build_enumerated(ty, props)
            elif isinstance(ty, IA5StringType):
                node = self.build_string(ty, props)
            elif isinstance(ty, SequenceType):
                node = self.build_record(ty, children, path)
                children = None
            elif isinstance(ty, ChoiceType):
                node = self.build_variant(ty, props, children, path)
                children = None
            elif isinstance(ty, SequenceOfType):
                node = self.build_list(ty, props, path, span)
            else:
                raise self.fail(f"unsupported type node {type(ty).__name__}", span)
            if children is not None:
                raise self.fail(
                    "ACN children are not applicable to this type", span
                )
        align = props.take("align")
        if align:
            node = P.Align(
                align,
                node,
                P.SizeBounds(
                    node.bounds.min_bits,
                    node.bounds.max_bits + align - 1,
                    P.join_alignment(align, node.bounds.alignment),
                ),
            )
        return node

    def build_reference(
        self, ty: ReferenceType, props: _Props, args: list[str], path: str
    ) -> P.PlanNode:
        target = ty.name
        if target not in self.ctx.plans:
            raise self.fail(f"unresolved reference to {target!r}", ty.span)
        params = self.ctx.formal_params.get(target, [])
        if len(params) != len(args):
            raise self.fail(
                f"{target!r} takes {len(params)} argument(s), {len(args)} given",
                ty.span,
            )
        inner = self.ctx.plans[target]
        if not params:
            return inner
        resolved_args = []
        for (ptype, pname), arg in zip(params, args):
            self.resolve_ref(arg, ty.span, "enum", ptype, purpose="determinant argument")
            resolved_args.append(arg)
        key = (target, tuple(resolved_args))
        known = self.outlined.get(key)
        if known is not None:
            return known
        node = P.Outlined(
            f"{target}__{path}",
            tuple((pname, arg) for (_, pname), arg in zip(params, resolved_args)),
            inner,
            inner.bounds,
        )
        self.outlined[key] = node
        return node

    # -- scalars -----------------------------------------------------------

    def build_integer(self, ty: IntegerType, props: _Props) -> P.PlanNode:
        span = ty.span
        rng = ty.value_range
        if rng and not (I64_MIN <= rng[0] <= rng[1] <= I64_MAX):
            raise self.fail(f"range {rng} outside the signed 64-bit domain", span)
        encoding = props.take("encoding")
        width = props.take("size_bits")
        endianness = props.take("endianness")
        if endianness == "little":
            raise self.fail(
                "endianness little is not supported for integers", props.span
            )
        if encoding in ("IEEE754-1985-32", "IEEE754-1985-64"):
            raise self.fail("IEEE754 encodings apply to REAL only", props.span)
        if encoding == "ASCII":
            raise self.fail(
                "ASCII integer encodings are not supported", props.span
            )
        if encoding is None and width is None:
            if rng is None:
                raise self.fail(
                    "INTEGER needs a range constraint or an ACN size", span
                )
            node: P.PlanNode = P.ConstrainedInt(
                rng[0], rng[1], P.exact(bits_needed(rng[1] - rng[0]))
            )
            return P.ConstraintCheck(
                (P.IntRangeCheck(rng[0], rng[1]),), node, node.bounds
            )
        if width is None:
            raise self.fail(f"encoding {encoding} needs a size property", props.span)
        if not 1 <= width <= 64:
            raise self.fail(f"integer size {width} outside 1..64", props.span)
        if encoding is None:
            encoding = "twos-complement" if rng and rng[0] < 0 else "pos-int"
        if encoding == "pos-int":
            implied = (0, min((1 << width) - 1, I64_MAX))
            node = (
                P.UIntAligned(width, "big", P.exact(width))
                if width in (8, 16, 32, 64)
                else P.UIntBits(width, P.exact(width))
            )
        else:
            implied = (-(1 << (width - 1)), (1 << (width - 1)) - 1)
            node = P.IntTwos(width, width in (8, 16, 32, 64), P.exact(width))
        lo, hi = rng if rng else implied
        if not implied[0] <= lo <= hi <= implied[1]:
            raise self.fail(
                f"range [{lo}, {hi}] does not fit {encoding} size {width}", span
            )
        return P.ConstraintCheck((P.IntRangeCheck(lo, hi),), node, node.bounds)

    def build_real(self, ty: RealType, props: _Props) -> P.PlanNode:
        encoding = props.take("encoding")
        if encoding not in ("IEEE754-1985-32", "IEEE754-1985-64"):
            raise self.fail(
                "REAL needs encoding IEEE754-1985-32 or IEEE754-1985-64", ty.span
            )
        width = 32 if encoding.endswith("32") else 64
        endianness = props.take("endianness") or "big"
        return P.Real(width, endianness, P.exact(width))

    def build_enumerated(self, ty: EnumeratedType, props: _Props) -> P.PlanNode:
        span = ty.span
        explicit = [it for it in ty.items if it.value is not None]
        if explicit and len(explicit) != len(ty.items):
            raise self.fail(
                "either all enumeration items carry values or none do", span
            )
        encoding = props.take("encoding")
        width = props.take("size_bits")
        if encoding not in (None, "pos-int"):
            raise self.fail(f"encoding {encoding} not supported on ENUMERATED", span)
        if encoding is None and width is None:
            if explicit:
                raise self.fail(
                    "explicit enumeration values need encoding pos-int", span
                )
            items = tuple((it.name, i) for i, it in enumerate(ty.items))
            n_bits = bits_needed(len(items) - 1)
            return P.Enumerated(items, n_bits, P.exact(n_bits))
        items = tuple(
            (it.name, it.value if it.value is not None else i)
            for i, it in enumerate(ty.items)
        )
        top = max(v for _, v in items)
        if min(v for _, v in items) < 0:
            raise self.fail("enumeration values must be nonnegative", span)
        if width is None:
            width = max(bits_needed(top), 1)
        if not 1 <= width <= 64 or top >> width:
            raise self.fail(f"enumeration values do not fit in {width} bits", span)
        return P.Enumerated(items, width, P.exact(width))

    def build_string(self, ty: IA5StringType, props: _Props) -> P.PlanNode:
        span = ty.span
        if ty.size_range is None:
            raise self.fail("IA5String needs a SIZE constraint", span)
        min_len, max_len = ty.size_range
        encoding = props.take("encoding")
        null_terminated = props.take("size_null_terminated")
        pattern = props.take("termination_pattern")
        size_ref = props.take("size_ref")
        checks: list[P.Check] = [P.SizeRangeCheck(min_len, max_len)]
        if ty.alphabet is not None:
            checks.append(P.AlphabetCheck(ty.alphabet))
        if encoding == "ASCII":
            if not null_terminated or size_ref:
                raise self.fail(
                    "encoding ASCII requires size null-terminated", props.span
                )
            pattern = pattern if pattern is not None else b"\x00"
            if not 1 <= len(pattern) <= 8:
                raise self.fail(
                    "termination pattern must be 1..8 bytes", props.span
                )
            node: P.PlanNode = P.StringAsciiNull(
                min_len, max_len, pattern,
                P.SizeBounds((min_len + len(pattern)) * 8,
                             (max_len + len(pattern)) * 8),
            )
            return P.ConstraintCheck(tuple(checks), node, node.bounds)
        if encoding is not None:
            raise self.fail(f"encoding {encoding} not supported on IA5String", span)
        if null_terminated or pattern is not None:
            raise self.fail(
                "size null-terminated requires encoding ASCII", props.span
            )
        alphabet = ty.alphabet if ty.alphabet is not None else IA5_CHARS
        char_bits = bits_needed(len(alphabet) - 1)
        if size_ref is not None:
            self.resolve_ref(size_ref, props.span, "int", purpose="size determinant")
            node = P.StringCharIndex(
                alphabet, min_len, max_len, size_ref,
                P.SizeBounds(min_len * char_bits, max_len * char_bits),
            )
        else:
            len_bits = bits_needed(max_len - min_len)
            node = P.StringCharIndex(
                alphabet, min_len, max_len, None,
                P.SizeBounds(len_bits + min_len * char_bits,
                             len_bits + max_len * char_bits),
            )
        return P.ConstraintCheck(tuple(checks), node, node.bounds)

    # -- composites ----------------------------------------------------------

    def build_record(
        self, ty: SequenceType, children: list[AcnChild] | None, path: str
    ) -> P.PlanNode:
        merged = self._merge_children(ty, children)
        frame = _Frame(barrier=False)
        frame.pending = {name for name, _, _ in merged}
        self.frames.append(frame)
        fields: list[P.RecordField] = []
        min_bits = max_bits = 0
        alignment = 0
        try:
            for name, asn_field, child in merged:
                child_props = _Props(child.props if child else None,
                                     child.span if child else ty.span)
                present_when = child_props.take("present_when")
                if child and child.inserted_type:
                    if present_when:
                        raise self.fail(
                            f"present-when is not valid on inserted field {name!r}",
                            child.span,
                        )
                    node = self._build_inserted(child)
                    optional = False
                    acn = True
                else:
                    assert asn_field is not None
                    optional = asn_field.optional
                    if optional and present_when is None:
                        raise self.fail(
                            f"optional field {name!r} needs a present-when property",
                            asn_field.span,
                        )
                    if not optional and present_when is not None:
                        raise self.fail(
                            f"present-when on mandatory field {name!r}",
                            child_props.span,
                        )
                    if present_when is not None:
                        self.resolve_ref(
                            present_when, child_props.span, "bool",
                            purpose="present-when determinant",
                        )
                    node = self.build_type(
                        asn_field.ty, child_props,
                        child.children if child else None,
                        list(child.actual_args) if child else [],
                        f"{path}.{name}", asn_field.span,
                    )
                    acn = False
                self._finish_props(child_props, f"field {name}")
                category, enum_items = _categorize(node)
                type_name = None
                if child and child.inserted_type:
                    type_name = child.inserted_type
                elif asn_field and isinstance(asn_field.ty, ReferenceType):
                    type_name = asn_field.ty.name
                frame.pending.discard(name)
                frame.entries[name] = _ScopeEntry(name, category, type_name, enum_items)
                fields.append(
                    P.RecordField(name, node, acn=acn, optional=optional,
                                  present_when=present_when)
                )
                min_bits += 0 if optional else node.bounds.min_bits
                max_bits += node.bounds.max_bits
                alignment = P.join_alignment(alignment, node.bounds.alignment)
            for name, entry in frame.entries.items():
                if not entry.used and any(
                    f.name == name and f.acn for f in fields
                ):
                    raise self.fail(
                        f"ACN-inserted field {name!r} is never referenced",
                        ty.span,
                    )
        finally:
            self.frames.pop()
        return P.Record(tuple(fields), P.SizeBounds(min_bits, max_bits, alignment))

    def _merge_children(
        self, ty: SequenceType, children: list[AcnChild] | None
    ) -> list[tuple[str, object, AcnChild | None]]:
        if children is None:
            return [(f.name, f, None) for f in ty.fields]
        by_name = {f.name: f for f in ty.fields}
        merged: list[tuple[str, object, AcnChild | None]] = []
        listed: list[str] = []
        for child in children:
            if child.inserted_type:
                if child.name in by_name:
                    raise self.fail(
                        f"inserted field {child.name!r} collides with an ASN.1 field",
                        child.span,
                    )
                merged.append((child.name, None, child))
            elif child.name in by_name:
                listed.append(child.name)
                merged.append((child.name, by_name[child.name], child))
            else:
                raise self.fail(
                    f"ACN child {child.name!r} names no ASN.1 field", child.span
                )
        asn_order = [f.name for f in ty.fields]
        if listed != asn_order:
            missing = [n for n in asn_order if n not in listed]
            if missing:
                raise self.fail(
                    f"ACN children must list every field; missing {missing}", ty.span
                )
            raise self.fail(
                "ACN children must keep the ASN.1 field order", ty.span
            )
        return merged

    def _build_inserted(self, child: AcnChild) -> P.PlanNode:
        target = child.inserted_type
        assert target is not None
        if target not in self.ctx.plans:
            raise self.fail(
                f"unresolved inserted field type {target!r}", child.span
            )
        if self.ctx.formal_params.get(target):
            raise self.fail(
                f"inserted field type {target!r} cannot be parameterized", child.span
            )
        node = self.ctx.plans[target]
        category, _ = _categorize(node)
        if category not in ("int", "bool", "enum"):
            raise self.fail(
                f"inserted field {child.name!r} must be an integer, boolean or "
                "enumerated type",
                child.span,
            )
        return node

    def build_variant(
        self,
        ty: ChoiceType,
        props: _Props,
        children: list[AcnChild] | None,
        path: str,
    ) -> P.PlanNode:
        determinant = props.take("determinant")
        producer_items = None
        if determinant is not None:
            entry = self.resolve_ref(
                determinant, props.span, "enum", purpose="determinant"
            )
            producer_items = entry.enum_items or ()
        child_by_name: dict[str, AcnChild] = {}
        for child in children or []:
            if child.inserted_type:
                raise self.fail(
                    "CHOICE cannot carry inserted fields", child.span
                )
            if child.name not in {alt.name for alt in ty.alternatives}:
                raise self.fail(
                    f"ACN child {child.name!r} names no alternative", child.span
                )
            child_by_name[child.name] = child
        alternatives = []
        min_bits = None
        max_bits = 0
        alignment = 0
        for alt in ty.alternatives:
            child = child_by_name.get(alt.name)
            child_props = _Props(child.props if child else None,
                                 child.span if child else alt.span)
            node = self.build_type(
                alt.ty, child_props, child.children if child else None,
                list(child.actual_args) if child else [],
                f"{path}.{alt.name}", alt.span,
            )
            self._finish_props(child_props, f"alternative {alt.name}")
            if producer_items is not None and alt.name not in {
                n for n, _ in producer_items
            }:
                raise self.fail(
                    f"alternative {alt.name!r} is not an item of the "
                    f"determinant enumeration",
                    alt.span,
                )
            alternatives.append((alt.name, node))
            min_bits = node.bounds.min_bits if min_bits is None else min(
                min_bits, node.bounds.min_bits
            )
            max_bits = max(max_bits, node.bounds.max_bits)
            alignment = P.join_alignment(alignment, node.bounds.alignment)
        det_bits = 0 if determinant else bits_needed(len(alternatives) - 1)
        return P.Variant(
            determinant,
            tuple(alternatives),
            P.SizeBounds(det_bits + (min_bits or 0), det_bits + max_bits, alignment),
        )

    def build_list(
        self, ty: SequenceOfType, props: _Props, path: str, span: Span
    ) -> P.PlanNode:
        if ty.size_range is None:
            raise self.fail("SEQUENCE OF needs a SIZE constraint", span)
        lo, hi = ty.size_range
        element = self.build_type(
            ty.element, _Props(None, span), None, [], f"{path}[]", ty.element.span
        )
        size_ref = props.take("size_ref")
        if size_ref is not None:
            self.resolve_ref(size_ref, props.span, "int", purpose="size determinant")
            size_bits = 0
        else:
            size_bits = bits_needed(hi - lo)
        node = P.List(
            lo, hi, size_ref, element,
            P.SizeBounds(
                size_bits + lo * element.bounds.min_bits,
                size_bits + hi * element.bounds.max_bits,
                element.bounds.alignment,
            ),
        )
        return P.ConstraintCheck(
            (P.SizeRangeCheck(lo, hi),), node, node.bounds
        )
