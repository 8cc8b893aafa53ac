"""Expression parsing and canonical rendering, plus system-definition files.

Grammar (no implicit multiplication):
    expr   := term (('+'|'-') term)*
    term   := unary ('*' unary)*
    unary  := '-' unary | power
    power  := atom ('^' positive-integer)?
    atom   := rational | 'i' | 'sqrt' '(' integer ')' | variable | '(' expr ')'

Precedence is ^ > unary- > * > binary +/-.  sqrt(e) is legal only for the
field's d or a perfect square; 'i' and irrational sqrt require Q(i,sqrt d).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction

from .field import RATIONALS, FieldElement, FieldKind, FieldSpec, quad_gauss
from .poly import MultiPoly, VarSet


class ParseError(ValueError):
    """Syntax or context error with 1-based line/column position."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class ParseContext:
    varset: VarSet
    field: FieldSpec


# -- tokenizer -----------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<number>\d+(?:[ \t]*/[ \t]*\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*^(),=])
  | (?P<ws>\s+)
  | (?P<bad>.)
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str  # 'number' | 'name' | 'op' | 'end'
    text: str
    line: int
    column: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    line = 1
    line_start = 0
    for match in _TOKEN_RE.finditer(text):
        kind = match.lastgroup
        value = match.group()
        column = match.start() - line_start + 1
        if kind == "ws":
            for i, ch in enumerate(value):
                if ch == "\n":
                    line += 1
                    line_start = match.start() + i + 1
            continue
        if kind == "bad":
            raise ParseError(f"unexpected character {value!r}", line, column)
        tokens.append(_Token(kind, value, line, column))
    last_col = len(text) - line_start + 1
    tokens.append(_Token("end", "", line, last_col))
    return tokens


class _Parser:
    def __init__(self, text: str, ctx: ParseContext):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.ctx = ctx

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect_op(self, op: str) -> _Token:
        tok = self.peek()
        if tok.kind != "op" or tok.text != op:
            raise ParseError(f"expected {op!r}, found {tok.text!r}", tok.line, tok.column)
        return self.advance()

    def error(self, message: str) -> ParseError:
        tok = self.peek()
        return ParseError(message, tok.line, tok.column)

    # grammar rules ------------------------------------------------------

    def parse(self) -> MultiPoly:
        value = self.expr()
        tok = self.peek()
        if tok.kind != "end":
            raise self.error(f"unexpected trailing input {tok.text!r}")
        return value

    def expr(self) -> MultiPoly:
        value = self.term()
        while True:
            tok = self.peek()
            if tok.kind == "op" and tok.text in "+-":
                self.advance()
                rhs = self.term()
                value = value + rhs if tok.text == "+" else value - rhs
            else:
                return value

    def term(self) -> MultiPoly:
        value = self.unary()
        while True:
            tok = self.peek()
            if tok.kind == "op" and tok.text == "*":
                self.advance()
                value = value * self.unary()
            elif tok.kind in ("number", "name") or (tok.kind == "op" and tok.text == "("):
                raise self.error(f"implicit multiplication before {tok.text!r} is not allowed")
            else:
                return value

    def unary(self) -> MultiPoly:
        tok = self.peek()
        if tok.kind == "op" and tok.text == "-":
            self.advance()
            return -self.unary()
        return self.power()

    def power(self) -> MultiPoly:
        base = self.atom()
        tok = self.peek()
        if tok.kind == "op" and tok.text == "^":
            self.advance()
            etok = self.peek()
            if etok.kind != "number" or "/" in etok.text or int(etok.text) < 1:
                raise self.error("exponent must be a positive integer")
            if int(etok.text) > 10_000:
                raise self.error("exponent too large")
            self.advance()
            return base ** int(etok.text)
        return base

    def atom(self) -> MultiPoly:
        varset, field = self.ctx.varset, self.ctx.field
        tok = self.peek()
        if tok.kind == "number":
            self.advance()
            try:
                num = Fraction(re.sub(r"[ \t]+", "", tok.text))
            except ZeroDivisionError:
                raise ParseError("division by zero", tok.line, tok.column) from None
            return MultiPoly.constant(varset, field, num)
        if tok.kind == "name":
            name = tok.text
            if name == "i":
                if field.kind is not FieldKind.QUAD_GAUSS:
                    raise self.error("'i' requires the field Q(i,sqrt d)")
                self.advance()
                return MultiPoly.constant(varset, field, field.i())
            if name == "sqrt":
                self.advance()
                self.expect_op("(")
                ntok = self.peek()
                if ntok.kind != "number" or "/" in ntok.text:
                    raise self.error("sqrt argument must be an integer")
                self.advance()
                self.expect_op(")")
                return MultiPoly.constant(varset, field, self._sqrt_value(int(ntok.text), tok))
            mvar = re.fullmatch(r"([qp])([0-9]+)", name)
            if mvar:
                kind, num = mvar.group(1), int(mvar.group(2))
                if not 1 <= num <= varset.m:
                    raise ParseError(
                        f"unknown variable {name!r} (m = {varset.m})", tok.line, tok.column
                    )
                self.advance()
                index = num if kind == "q" else varset.m + num
                return MultiPoly.variable(varset, field, index)
            raise ParseError(f"unknown identifier {name!r}", tok.line, tok.column)
        if tok.kind == "op" and tok.text == "(":
            self.advance()
            value = self.expr()
            self.expect_op(")")
            return value
        raise self.error(f"expected a value, found {tok.text!r}" if tok.text else "unexpected end of input")

    def _sqrt_value(self, n: int, tok: _Token) -> FieldElement:
        field = self.ctx.field
        if n < 0:
            if field.kind is FieldKind.QUAD_GAUSS:
                return field.i() * self._sqrt_value(-n, tok)
        else:
            root = math.isqrt(n)
            if root * root == n:
                return field.from_rational(root)
            # square part extracted: sqrt(k^2 d) = k sqrt(d)
            if field.kind is FieldKind.QUAD_GAUSS and n % field.d == 0:
                k = math.isqrt(n // field.d)
                if k * k * field.d == n:
                    return field.sqrt_d() * field.from_rational(k)
        raise ParseError(
            f"sqrt({n}) is not available in this field", tok.line, tok.column
        )


def parse_poly(text: str, ctx: ParseContext) -> MultiPoly:
    """Parse an expression into an exact polynomial over the context's ring."""
    return _Parser(text, ctx).parse()


# -- rendering -----------------------------------------------------------------


def _rational_str(x: Fraction) -> str:
    return str(x)


def _component_strs(x: FieldElement) -> list[tuple[int, str]]:
    """(sign, magnitude-string) per nonzero basis component, basis order."""
    out: list[tuple[int, str]] = []
    d = x.spec.d

    def push(value: Fraction, suffix: str) -> None:
        if not value:
            return
        sign = 1 if value > 0 else -1
        mag = abs(value)
        if suffix and mag == 1:
            out.append((sign, suffix))
        elif suffix:
            out.append((sign, f"{_rational_str(mag)}*{suffix}"))
        else:
            out.append((sign, _rational_str(mag)))

    push(x.a, "")
    push(x.b, "i")
    push(x.c, f"sqrt({d})")
    push(x.e, f"i*sqrt({d})")
    return out


def format_field_element(x: FieldElement) -> str:
    parts = _component_strs(x)
    if not parts:
        return "0"
    pieces = []
    for idx, (sign, mag) in enumerate(parts):
        if idx == 0:
            pieces.append(("-" if sign < 0 else "") + mag)
        else:
            pieces.append(("- " if sign < 0 else "+ ") + mag)
    return " ".join(pieces)


def _format_term(exps: tuple[int, ...], coef: FieldElement, varset: VarSet) -> tuple[int, str]:
    """Return (sign, body) for one term in canonical text."""
    monos = []
    for i, a in enumerate(exps):
        if a == 0:
            continue
        name = varset.name(i + 1)
        monos.append(name if a == 1 else f"{name}^{a}")
    comps = _component_strs(coef)
    if len(comps) == 1:
        sign, mag = comps[0]
        if monos and mag == "1":
            return sign, "*".join(monos)
        return sign, "*".join([mag] + monos)
    body = "(" + format_field_element(coef) + ")"
    return 1, "*".join([body] + monos)


def format_poly(A: MultiPoly) -> str:
    """Canonical text: terms in decreasing canonical order; reparses bit-exactly."""
    if A.is_zero():
        return "0"
    pieces = []
    for idx, (exps, coef) in enumerate(A.sorted_terms()):
        sign, body = _format_term(exps, coef, A.varset)
        if idx == 0:
            pieces.append(("-" if sign < 0 else "") + body)
        else:
            pieces.append(("- " if sign < 0 else "+ ") + body)
    return " ".join(pieces)


# -- system-definition files -----------------------------------------------------

_FIELD_RE = re.compile(r"^Q\(\s*i\s*,\s*sqrt\s*(\d+)\s*\)$")


@dataclass(frozen=True)
class SystemDefinition:
    m: int
    field: FieldSpec
    mu: tuple[FieldElement, ...]
    potential: MultiPoly


def parse_field_spec(text: str) -> FieldSpec:
    text = text.strip()
    if text == "Q":
        return RATIONALS
    match = _FIELD_RE.match(text)
    if match:
        try:
            return quad_gauss(int(match.group(1)))
        except ValueError as exc:
            raise ParseError(str(exc), 1, 1) from None
    raise ParseError(f"unrecognised field {text!r}; expected Q or Q(i,sqrtD)", 1, 1)


def parse_system_definition(text: str) -> SystemDefinition:
    """Parse the line-based `key = value` system file (# starts a comment)."""
    entries: dict[str, tuple[str, int]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"expected 'key = value', got {raw.strip()!r}", lineno, 1)
        key, _, value = line.partition("=")
        key = key.strip()
        if key in entries:
            raise ParseError(f"duplicate key {key!r}", lineno, 1)
        entries[key] = (value.strip(), lineno)
    for required in ("m", "field", "mu", "V"):
        if required not in entries:
            raise ParseError(f"missing key {required!r}", 1, 1)
    unknown = set(entries) - {"m", "field", "mu", "V"}
    if unknown:
        key = sorted(unknown)[0]
        raise ParseError(f"unknown key {key!r}", entries[key][1], 1)

    mtext, mline = entries["m"]
    try:
        m = int(mtext)
    except ValueError:
        raise ParseError(f"m must be an integer, got {mtext!r}", mline, 1) from None
    if m < 2:
        raise ParseError(f"m must be >= 2, got {m}", mline, 1)

    ftext, fline = entries["field"]
    try:
        field = parse_field_spec(ftext)
    except ValueError as exc:
        raise ParseError(str(exc), fline, 1) from None

    mutext, muline = entries["mu"]
    parts = [p.strip() for p in mutext.split(",")]
    if len(parts) != m:
        raise ParseError(f"mu must list {m} rationals, got {len(parts)}", muline, 1)
    mu = []
    for part in parts:
        try:
            mu.append(field.from_rational(Fraction(part)))
        except (ValueError, ZeroDivisionError):
            raise ParseError(f"bad rational {part!r} in mu", muline, 1) from None

    vtext, vline = entries["V"]
    varset = VarSet(m)
    ctx = ParseContext(varset, field)
    try:
        V = parse_poly(vtext, ctx)
    except ParseError as exc:
        raise ParseError(f"in V: {exc}", vline, 1) from None
    if V.depends_on_p():
        raise ParseError("V must depend on q-variables only", vline, 1)
    return SystemDefinition(m=m, field=field, mu=tuple(mu), potential=V)


def format_field_spec(field: FieldSpec) -> str:
    if field.kind is FieldKind.RATIONALS:
        return "Q"
    return f"Q(i,sqrt{field.d})"
