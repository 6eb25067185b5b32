"""Lexing and parsing of the ASN.1 subset and its companion ACN notation.

Both parsers are plain recursive descent over a shared token stream.  The
first syntax error aborts with a located diagnostic; structural checks that
can be batched (duplicate names, empty ranges) are collected and reported
together.  Pretty-printers for both grammars close the parse/print fixpoint.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import Diagnostic, DiagnosticError
from .syntax import (
    ALIGN_UNITS,
    AcnChild,
    AcnEntry,
    AcnProps,
    AcnSpec,
    AsnModule,
    AsnType,
    BooleanType,
    ChoiceAlternative,
    ChoiceType,
    EnumItem,
    EnumeratedType,
    IA5StringType,
    IntegerType,
    NullType,
    RealType,
    ReferenceType,
    SequenceField,
    SequenceOfType,
    SequenceType,
    Span,
    TypeAssignment,
    ENCODINGS,
)

# ---------------------------------------------------------------------------
# Lexer
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
      (?P<ws>\s+)
    | (?P<linecomment>--[^\n]*)
    | (?P<blockcomment>/\*.*?\*/)
    | (?P<assign>::=)
    | (?P<dotdot>\.\.)
    | (?P<hexstring>'[0-9A-Fa-f]*'H)
    | (?P<string>"[^"\n]*")
    | (?P<number>\d+)
    | (?P<ident>[A-Za-z](?:[A-Za-z0-9]|-(?=[A-Za-z0-9]))*)
    | (?P<punct>[{}()\[\]<>,:;|.\-])
    """,
    re.VERBOSE | re.DOTALL,
)


@dataclass(frozen=True)
class Token:
    kind: str  # ident | number | string | hexstring | punct-ish kinds
    text: str
    line: int
    col: int

    @property
    def span(self) -> Span:
        return Span(self.line, self.col)


EOF = "<eof>"


def tokenize(text: str, allow_block_comments: bool) -> list[Token]:
    tokens: list[Token] = []
    pos, line, col = 0, 1, 1
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise DiagnosticError(
                Diagnostic(f"unexpected character {text[pos]!r}", line, col)
            )
        kind = m.lastgroup or ""
        raw = m.group()
        if kind == "blockcomment" and not allow_block_comments:
            raise DiagnosticError(
                Diagnostic("block comments are not allowed here", line, col)
            )
        if kind not in ("ws", "linecomment", "blockcomment"):
            tok_kind = raw if kind == "punct" else kind
            if kind == "assign":
                tok_kind = "::="
            elif kind == "dotdot":
                tok_kind = ".."
            tokens.append(Token(tok_kind, raw, line, col))
        newlines = raw.count("\n")
        if newlines:
            line += newlines
            col = len(raw) - raw.rfind("\n")
        else:
            col += len(raw)
        pos = m.end()
    tokens.append(Token(EOF, "", line, col))
    return tokens


class TokenCursor:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.i = 0

    def peek(self, ahead: int = 0) -> Token:
        return self.tokens[min(self.i + ahead, len(self.tokens) - 1)]

    def at(self, kind: str, text: str | None = None) -> bool:
        tok = self.peek()
        return tok.kind == kind and (text is None or tok.text == text)

    def at_keyword(self, word: str) -> bool:
        return self.at("ident", word)

    def next(self) -> Token:
        tok = self.tokens[self.i]
        if tok.kind != EOF:
            self.i += 1
        return tok

    def expect(self, kind: str, text: str | None = None) -> Token:
        tok = self.peek()
        if tok.kind != kind or (text is not None and tok.text != text):
            want = text or kind
            got = tok.text or "end of input"
            raise DiagnosticError(
                Diagnostic(f"expected {want!r}, found {got!r}", tok.line, tok.col)
            )
        return self.next()

    def expect_keyword(self, word: str) -> Token:
        return self.expect("ident", word)

    def fail(self, message: str) -> DiagnosticError:
        tok = self.peek()
        return DiagnosticError(Diagnostic(message, tok.line, tok.col))


# ---------------------------------------------------------------------------
# ASN.1 parser
# ---------------------------------------------------------------------------

_ASN_KEYWORDS = {
    "DEFINITIONS", "BEGIN", "END", "SEQUENCE", "OF", "CHOICE", "INTEGER",
    "BOOLEAN", "ENUMERATED", "IA5String", "NULL", "REAL", "SIZE", "FROM",
    "OPTIONAL",
}


def parse_asn1(text: str) -> AsnModule:
    """Parse an ASN.1 module; raises DiagnosticError on any problem."""
    cur = TokenCursor(tokenize(text, allow_block_comments=False))
    name = cur.expect("ident")
    cur.expect_keyword("DEFINITIONS")
    cur.expect("::=")
    cur.expect_keyword("BEGIN")
    assignments = []
    while not cur.at_keyword("END"):
        if cur.at(EOF):
            raise cur.fail("missing END")
        assignments.append(_parse_assignment(cur))
    cur.expect_keyword("END")
    cur.expect(EOF)
    module = AsnModule(name.text, assignments, span=name.span)
    _check_asn_module(module)
    return module


def _parse_assignment(cur: TokenCursor) -> TypeAssignment:
    name = cur.expect("ident")
    if name.text in _ASN_KEYWORDS:
        raise DiagnosticError(
            Diagnostic(f"keyword {name.text!r} cannot name a type", name.line, name.col)
        )
    cur.expect("::=")
    ty = _parse_type(cur)
    return TypeAssignment(name.text, ty, span=name.span)


def _parse_type(cur: TokenCursor) -> AsnType:
    tok = cur.peek()
    if cur.at_keyword("SEQUENCE"):
        cur.next()
        if cur.at("{"):
            return _parse_sequence_body(cur, tok.span)
        size_range = None
        if cur.at("("):
            cur.next()
            cur.expect_keyword("SIZE")
            cur.expect("(")
            size_range = _parse_range(cur)
            cur.expect(")")
            cur.expect(")")
        cur.expect_keyword("OF")
        element = _parse_type(cur)
        return SequenceOfType(size_range, element, span=tok.span)
    if cur.at_keyword("CHOICE"):
        cur.next()
        cur.expect("{")
        alternatives = []
        while True:
            alt_name = cur.expect("ident")
            alt_ty = _parse_type(cur)
            alternatives.append(ChoiceAlternative(alt_name.text, alt_ty, span=alt_name.span))
            if not cur.at(","):
                break
            cur.next()
        cur.expect("}")
        return ChoiceType(alternatives, span=tok.span)
    if cur.at_keyword("INTEGER"):
        cur.next()
        value_range = None
        if cur.at("("):
            cur.next()
            value_range = _parse_range(cur)
            cur.expect(")")
        return IntegerType(value_range, span=tok.span)
    if cur.at_keyword("BOOLEAN"):
        cur.next()
        return BooleanType(span=tok.span)
    if cur.at_keyword("NULL"):
        cur.next()
        return NullType(span=tok.span)
    if cur.at_keyword("REAL"):
        cur.next()
        return RealType(span=tok.span)
    if cur.at_keyword("ENUMERATED"):
        cur.next()
        cur.expect("{")
        items = []
        while True:
            item_name = cur.expect("ident")
            value = None
            if cur.at("("):
                cur.next()
                value = _parse_signed_number(cur)
                cur.expect(")")
            items.append(EnumItem(item_name.text, value, span=item_name.span))
            if not cur.at(","):
                break
            cur.next()
        cur.expect("}")
        return EnumeratedType(items, span=tok.span)
    if cur.at_keyword("IA5String"):
        cur.next()
        size_range = None
        alphabet = None
        while cur.at("("):
            cur.next()
            if cur.at_keyword("SIZE"):
                cur.next()
                cur.expect("(")
                size_range = _parse_range(cur)
                cur.expect(")")
            elif cur.at_keyword("FROM"):
                cur.next()
                cur.expect("(")
                alphabet = _parse_charset(cur)
                cur.expect(")")
            else:
                raise cur.fail("expected SIZE or FROM constraint")
            cur.expect(")")
        return IA5StringType(size_range, alphabet, span=tok.span)
    if cur.at("ident"):
        if tok.text in _ASN_KEYWORDS:
            raise cur.fail(f"unexpected keyword {tok.text!r}")
        cur.next()
        return ReferenceType(tok.text, span=tok.span)
    raise cur.fail(f"expected a type, found {tok.text!r}")


def _parse_sequence_body(cur: TokenCursor, span: Span) -> SequenceType:
    cur.expect("{")
    fields = []
    while True:
        field_name = cur.expect("ident")
        field_ty = _parse_type(cur)
        optional = False
        if cur.at_keyword("OPTIONAL"):
            cur.next()
            optional = True
        fields.append(SequenceField(field_name.text, field_ty, optional, span=field_name.span))
        if not cur.at(","):
            break
        cur.next()
    cur.expect("}")
    return SequenceType(fields, span=span)


def _parse_signed_number(cur: TokenCursor) -> int:
    negative = False
    if cur.at("-"):
        cur.next()
        negative = True
    num = cur.expect("number")
    value = int(num.text)
    return -value if negative else value


def _parse_range(cur: TokenCursor) -> tuple[int, int]:
    lo = _parse_signed_number(cur)
    if cur.at(".."):
        cur.next()
        hi = _parse_signed_number(cur)
    else:
        hi = lo
    return (lo, hi)


def _parse_charset(cur: TokenCursor) -> str:
    chars: list[str] = []
    while True:
        lit = cur.expect("string").text[1:-1]
        if cur.at(".."):
            cur.next()
            hi_tok = cur.peek()
            hi = cur.expect("string").text[1:-1]
            if len(lit) != 1 or len(hi) != 1:
                raise DiagnosticError(
                    Diagnostic("character range endpoints must be single characters",
                               hi_tok.line, hi_tok.col)
                )
            if ord(lit) > ord(hi):
                raise DiagnosticError(
                    Diagnostic(f"empty character range {lit!r}..{hi!r}",
                               hi_tok.line, hi_tok.col)
                )
            chars.extend(chr(c) for c in range(ord(lit), ord(hi) + 1))
        else:
            chars.extend(lit)
        if not cur.at("|"):
            break
        cur.next()
    seen: dict[str, None] = {}
    for c in chars:
        seen.setdefault(c)
    return "".join(seen)


def _check_asn_module(module: AsnModule) -> None:
    diags: list[Diagnostic] = []
    names: set[str] = set()
    for a in module.assignments:
        if a.name in names:
            diags.append(Diagnostic(f"duplicate type name {a.name!r}", a.span.line, a.span.col))
        names.add(a.name)
        _check_asn_type(a.ty, diags)
    if diags:
        raise DiagnosticError(diags)


def _check_asn_type(ty: AsnType, diags: list[Diagnostic]) -> None:
    if isinstance(ty, IntegerType):
        if ty.value_range and ty.value_range[0] > ty.value_range[1]:
            diags.append(Diagnostic(
                f"empty range {ty.value_range[0]} .. {ty.value_range[1]}",
                ty.span.line, ty.span.col))
    elif isinstance(ty, EnumeratedType):
        seen: set[str] = set()
        values: set[int] = set()
        for item in ty.items:
            if item.name in seen:
                diags.append(Diagnostic(f"duplicate enumeration item {item.name!r}",
                                        item.span.line, item.span.col))
            seen.add(item.name)
            if item.value is not None:
                if item.value in values:
                    diags.append(Diagnostic(f"duplicate enumeration value {item.value}",
                                            item.span.line, item.span.col))
                values.add(item.value)
    elif isinstance(ty, IA5StringType):
        if ty.size_range and not 0 <= ty.size_range[0] <= ty.size_range[1]:
            diags.append(Diagnostic(f"invalid SIZE range {ty.size_range}",
                                    ty.span.line, ty.span.col))
    elif isinstance(ty, SequenceType):
        seen = set()
        for f in ty.fields:
            if f.name in seen:
                diags.append(Diagnostic(f"duplicate field name {f.name!r}",
                                        f.span.line, f.span.col))
            seen.add(f.name)
            _check_asn_type(f.ty, diags)
    elif isinstance(ty, ChoiceType):
        seen = set()
        for alt in ty.alternatives:
            if alt.name in seen:
                diags.append(Diagnostic(f"duplicate alternative name {alt.name!r}",
                                        alt.span.line, alt.span.col))
            seen.add(alt.name)
            _check_asn_type(alt.ty, diags)
    elif isinstance(ty, SequenceOfType):
        if ty.size_range and not 0 <= ty.size_range[0] <= ty.size_range[1]:
            diags.append(Diagnostic(f"invalid SIZE range {ty.size_range}",
                                    ty.span.line, ty.span.col))
        _check_asn_type(ty.element, diags)


# ---------------------------------------------------------------------------
# ACN parser
# ---------------------------------------------------------------------------


def parse_acn(text: str) -> AcnSpec:
    """Parse ACN declarations, with or without a DEFINITIONS shell."""
    cur = TokenCursor(tokenize(text, allow_block_comments=True))
    module_name = None
    has_shell = cur.at("ident") and cur.peek(1).kind == "ident" \
        and cur.peek(1).text == "DEFINITIONS"
    if has_shell:
        module_name = cur.expect("ident").text
        cur.expect_keyword("DEFINITIONS")
        cur.expect("::=")
        cur.expect_keyword("BEGIN")
    entries = []
    while not cur.at(EOF) and not cur.at_keyword("END"):
        entries.append(_parse_acn_entry(cur))
    if has_shell:
        cur.expect_keyword("END")
    cur.expect(EOF)
    spec = AcnSpec(entries, module_name)
    _check_acn_spec(spec)
    return spec


def _parse_acn_entry(cur: TokenCursor) -> AcnEntry:
    name = cur.expect("ident")
    formal_params: list[tuple[str, str]] = []
    if cur.at("<"):
        cur.next()
        while True:
            ptype = cur.expect("ident").text
            cur.expect(":")
            pname = cur.expect("ident").text
            formal_params.append((ptype, pname))
            if not cur.at(","):
                break
            cur.next()
        cur.expect(">")
    props = _parse_props(cur)
    children = _parse_children(cur) if cur.at("{") else None
    return AcnEntry(name.text, formal_params, props, children, span=name.span)


def _parse_children(cur: TokenCursor) -> list[AcnChild]:
    cur.expect("{")
    children: list[AcnChild] = []
    if cur.at("}"):
        cur.next()
        return children
    while True:
        name = cur.expect("ident")
        inserted_type = None
        actual_args: list[str] = []
        if cur.at("ident"):
            inserted_type = cur.next().text
        elif cur.at("<"):
            cur.next()
            while True:
                actual_args.append(_parse_field_ref(cur))
                if not cur.at(","):
                    break
                cur.next()
            cur.expect(">")
        props = _parse_props(cur)
        sub = _parse_children(cur) if cur.at("{") else None
        children.append(AcnChild(name.text, props, inserted_type, actual_args, sub,
                                 span=name.span))
        if not cur.at(","):
            break
        cur.next()
    cur.expect("}")
    return children


def _parse_field_ref(cur: TokenCursor) -> str:
    parts = [cur.expect("ident").text]
    while cur.at("."):
        cur.next()
        parts.append(cur.expect("ident").text)
    return ".".join(parts)


def _parse_props(cur: TokenCursor) -> AcnProps:
    open_tok = cur.expect("[")
    props = AcnProps(span=open_tok.span)
    seen: set[str] = set()
    if cur.at("]"):
        cur.next()
        return props
    while True:
        key_tok = cur.expect("ident")
        key = key_tok.text
        if key in seen:
            raise DiagnosticError(
                Diagnostic(f"duplicate property {key!r}", key_tok.line, key_tok.col))
        seen.add(key)
        if key == "size":
            if cur.at("number"):
                props.size_bits = int(cur.next().text)
            elif cur.at_keyword("null-terminated"):
                cur.next()
                props.size_null_terminated = True
            else:
                props.size_ref = _parse_field_ref(cur)
        elif key == "encoding":
            enc = cur.expect("ident").text
            if enc not in ENCODINGS:
                raise DiagnosticError(
                    Diagnostic(f"unknown encoding {enc!r}", key_tok.line, key_tok.col))
            props.encoding = enc
        elif key == "endianness":
            end = cur.expect("ident").text
            if end not in ("big", "little"):
                raise DiagnosticError(
                    Diagnostic(f"unknown endianness {end!r}", key_tok.line, key_tok.col))
            props.endianness = end
        elif key == "align-to-next":
            unit = cur.expect("ident").text
            if unit not in ALIGN_UNITS:
                raise DiagnosticError(
                    Diagnostic(f"unknown alignment unit {unit!r}", key_tok.line, key_tok.col))
            props.align = ALIGN_UNITS[unit]
        elif key == "determinant":
            props.determinant = _parse_field_ref(cur)
        elif key == "present-when":
            props.present_when = _parse_field_ref(cur)
        elif key == "termination-pattern":
            hexs = cur.expect("hexstring").text[1:-2]
            if len(hexs) % 2:
                raise DiagnosticError(
                    Diagnostic("termination pattern needs an even digit count",
                               key_tok.line, key_tok.col))
            props.termination_pattern = bytes.fromhex(hexs)
        else:
            raise DiagnosticError(
                Diagnostic(f"unknown property {key!r}", key_tok.line, key_tok.col))
        if not cur.at(","):
            break
        cur.next()
    cur.expect("]")
    return props


def _check_acn_spec(spec: AcnSpec) -> None:
    diags: list[Diagnostic] = []
    names: set[str] = set()
    for entry in spec.entries:
        if entry.type_name in names:
            diags.append(Diagnostic(f"duplicate ACN entry {entry.type_name!r}",
                                    entry.span.line, entry.span.col))
        names.add(entry.type_name)
        pnames: set[str] = set()
        for _, pname in entry.formal_params:
            if pname in pnames:
                diags.append(Diagnostic(f"duplicate parameter {pname!r}",
                                        entry.span.line, entry.span.col))
            pnames.add(pname)
        _check_acn_children(entry.children, diags)
    if diags:
        raise DiagnosticError(diags)


def _check_acn_children(children: list[AcnChild] | None, diags: list[Diagnostic]) -> None:
    if not children:
        return
    seen: set[str] = set()
    for child in children:
        if child.name in seen:
            diags.append(Diagnostic(f"duplicate ACN child {child.name!r}",
                                    child.span.line, child.span.col))
        seen.add(child.name)
        if child.inserted_type and (child.actual_args or child.children):
            diags.append(Diagnostic(
                f"inserted field {child.name!r} cannot take arguments or children",
                child.span.line, child.span.col))
        _check_acn_children(child.children, diags)


# ---------------------------------------------------------------------------
# Pretty-printers
# ---------------------------------------------------------------------------


def print_asn1(module: AsnModule) -> str:
    lines = [f"{module.name} DEFINITIONS ::= BEGIN", ""]
    for a in module.assignments:
        lines.append(f"{a.name} ::= {_format_type(a.ty, 0)}")
        lines.append("")
    lines.append("END")
    return "\n".join(lines) + "\n"


def _format_range(r: tuple[int, int]) -> str:
    lo, hi = r
    return f"({lo})" if lo == hi else f"({lo} .. {hi})"


def _format_type(ty: AsnType, indent: int) -> str:
    pad = "  " * (indent + 1)
    close = "  " * indent
    if isinstance(ty, IntegerType):
        return "INTEGER" + (f" {_format_range(ty.value_range)}" if ty.value_range else "")
    if isinstance(ty, BooleanType):
        return "BOOLEAN"
    if isinstance(ty, NullType):
        return "NULL"
    if isinstance(ty, RealType):
        return "REAL"
    if isinstance(ty, EnumeratedType):
        items = ", ".join(
            it.name + (f"({it.value})" if it.value is not None else "")
            for it in ty.items
        )
        return f"ENUMERATED {{{items}}}"
    if isinstance(ty, IA5StringType):
        out = "IA5String"
        if ty.size_range:
            lo, hi = ty.size_range
            out += f" (SIZE({lo}))" if lo == hi else f" (SIZE({lo} .. {hi}))"
        if ty.alphabet is not None:
            out += f' (FROM("{ty.alphabet}"))'
        return out
    if isinstance(ty, SequenceOfType):
        out = "SEQUENCE "
        if ty.size_range:
            lo, hi = ty.size_range
            out += f"(SIZE({lo})) " if lo == hi else f"(SIZE({lo} .. {hi})) "
        return out + "OF " + _format_type(ty.element, indent)
    if isinstance(ty, SequenceType):
        body = ",\n".join(
            f"{pad}{f.name} {_format_type(f.ty, indent + 1)}"
            + (" OPTIONAL" if f.optional else "")
            for f in ty.fields
        )
        return f"SEQUENCE {{\n{body}\n{close}}}"
    if isinstance(ty, ChoiceType):
        body = ",\n".join(
            f"{pad}{alt.name} {_format_type(alt.ty, indent + 1)}"
            for alt in ty.alternatives
        )
        return f"CHOICE {{\n{body}\n{close}}}"
    if isinstance(ty, ReferenceType):
        return ty.name
    raise TypeError(f"unknown type node {ty!r}")


def print_acn(spec: AcnSpec) -> str:
    lines = []
    if spec.module_name:
        lines += [f"{spec.module_name} DEFINITIONS ::= BEGIN", ""]
    for entry in spec.entries:
        header = entry.type_name
        if entry.formal_params:
            header += "<" + ", ".join(f"{t}: {p}" for t, p in entry.formal_params) + ">"
        header += f" {_format_props(entry.props)}"
        if entry.children is not None:
            header += " {\n" + _format_children(entry.children, 1) + "\n}"
        lines.append(header)
        lines.append("")
    if spec.module_name:
        lines.append("END")
    return "\n".join(lines).rstrip("\n") + "\n"


def _format_children(children: list[AcnChild], indent: int) -> str:
    pad = "  " * indent
    parts = []
    for child in children:
        line = pad + child.name
        if child.inserted_type:
            line += f" {child.inserted_type}"
        if child.actual_args:
            line += "<" + ", ".join(child.actual_args) + ">"
        line += f" {_format_props(child.props)}"
        if child.children is not None:
            line += " {\n" + _format_children(child.children, indent + 1) + f"\n{pad}}}"
        parts.append(line)
    return ",\n".join(parts)


def _format_props(props: AcnProps) -> str:
    parts = []
    if props.size_bits is not None:
        parts.append(f"size {props.size_bits}")
    if props.size_null_terminated:
        parts.append("size null-terminated")
    if props.size_ref:
        parts.append(f"size {props.size_ref}")
    if props.encoding:
        parts.append(f"encoding {props.encoding}")
    if props.endianness:
        parts.append(f"endianness {props.endianness}")
    if props.align:
        unit = {8: "byte", 16: "word", 32: "dword"}[props.align]
        parts.append(f"align-to-next {unit}")
    if props.determinant:
        parts.append(f"determinant {props.determinant}")
    if props.present_when:
        parts.append(f"present-when {props.present_when}")
    if props.termination_pattern is not None:
        parts.append(f"termination-pattern '{props.termination_pattern.hex().upper()}'H")
    return "[" + ", ".join(parts) + "]"
