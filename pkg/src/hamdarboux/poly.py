"""Sparse multivariate polynomials over an exact coefficient field.

Variables are the canonical phase-space variables q1..qm, p1..pm of an
m-degree-of-freedom system, indexed 1..2m.  The canonical term order is
lexicographic with significance p1 > p2 > ... > pm > q1 > ... > qm, which
makes monic normalisation and printed output deterministic.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Iterable, Iterator, Sequence

from .field import FieldElement, FieldSpec

MAX_TERMS = 10**6

Exponents = tuple[int, ...]


class VarSetMismatchError(ValueError):
    """Operands live in different polynomial rings."""


class TooDenseError(ValueError):
    """Guard against runaway dense intermediate results."""


class VarSet:
    """The 2m phase-space variables q1..qm, p1..pm."""

    __slots__ = ("m",)

    def __init__(self, m: int):
        if m < 1:
            raise ValueError("need m >= 1")
        self.m = m

    @property
    def n(self) -> int:
        return 2 * self.m

    def name(self, index: int) -> str:
        """1-based variable name: 1..m are q's, m+1..2m are p's."""
        if not 1 <= index <= self.n:
            raise IndexError(f"variable index {index} out of range 1..{self.n}")
        if index <= self.m:
            return f"q{index}"
        return f"p{index - self.m}"

    def names(self) -> list[str]:
        return [self.name(i) for i in range(1, self.n + 1)]

    def __eq__(self, other: object) -> bool:
        return isinstance(other, VarSet) and self.m == other.m

    def __hash__(self) -> int:
        return hash(("VarSet", self.m))

    def __repr__(self) -> str:
        return f"VarSet(m={self.m})"


class Direction:
    """A positive integer weight per variable, defining the gamma grading."""

    __slots__ = ("gamma",)

    def __init__(self, gamma: Sequence[int]):
        gamma = tuple(int(g) for g in gamma)
        if not gamma or any(g < 1 for g in gamma):
            raise ValueError("direction entries must be positive integers")
        self.gamma = gamma

    def weight(self, exps: Exponents) -> int:
        return sum(g * a for g, a in zip(self.gamma, exps))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Direction) and self.gamma == other.gamma

    def __hash__(self) -> int:
        return hash(self.gamma)

    def __repr__(self) -> str:
        return f"Direction{self.gamma}"


def monomial_key(m: int) -> Callable[[Exponents], tuple[int, ...]]:
    """Sort key for the canonical order (p-block before q-block, lex)."""

    def key(exps: Exponents) -> tuple[int, ...]:
        return exps[m:] + exps[:m]

    return key


class MultiPoly:
    """Immutable sparse polynomial: map exponent-tuple -> nonzero coefficient."""

    __slots__ = ("varset", "field", "terms")

    def __init__(self, varset: VarSet, field: FieldSpec, terms: dict[Exponents, FieldElement]):
        if len(terms) > MAX_TERMS:
            raise TooDenseError(f"polynomial with {len(terms)} terms exceeds the {MAX_TERMS} guard")
        self.varset = varset
        self.field = field
        self.terms = terms

    # -- constructors ----------------------------------------------------

    @classmethod
    def zero(cls, varset: VarSet, field: FieldSpec) -> "MultiPoly":
        return cls(varset, field, {})

    @classmethod
    def constant(cls, varset: VarSet, field: FieldSpec, value) -> "MultiPoly":
        if isinstance(value, (int, Fraction)):
            value = field.from_rational(value)
        if value.is_zero():
            return cls.zero(varset, field)
        return cls(varset, field, {(0,) * varset.n: value})

    @classmethod
    def variable(cls, varset: VarSet, field: FieldSpec, index: int) -> "MultiPoly":
        if not 1 <= index <= varset.n:
            raise IndexError(f"variable index {index} out of range 1..{varset.n}")
        exps = [0] * varset.n
        exps[index - 1] = 1
        return cls(varset, field, {tuple(exps): field.one()})

    @classmethod
    def from_terms(
        cls, varset: VarSet, field: FieldSpec, items: Iterable[tuple[Exponents, FieldElement]]
    ) -> "MultiPoly":
        terms: dict[Exponents, FieldElement] = {}
        for exps, coef in items:
            cur = terms.get(exps)
            coef = coef if cur is None else cur + coef
            if coef.is_zero():
                terms.pop(exps, None)
            else:
                terms[exps] = coef
        return cls(varset, field, terms)

    # -- predicates and views ---------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and not any(next(iter(self.terms))))

    def constant_value(self) -> FieldElement:
        if self.is_zero():
            return self.field.zero()
        if not self.is_constant():
            raise ValueError("not a constant polynomial")
        return next(iter(self.terms.values()))

    def total_degree(self) -> int:
        """Ordinary total degree; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def degree_in(self, index: int) -> int:
        if not self.terms:
            return -1
        return max(e[index - 1] for e in self.terms)

    def variables_used(self) -> set[int]:
        used: set[int] = set()
        for exps in self.terms:
            for i, a in enumerate(exps):
                if a:
                    used.add(i + 1)
        return used

    def depends_on_p(self) -> bool:
        m = self.varset.m
        return any(any(e[m:]) for e in self.terms)

    def sorted_terms(self, reverse: bool = True) -> list[tuple[Exponents, FieldElement]]:
        key = monomial_key(self.varset.m)
        return sorted(self.terms.items(), key=lambda kv: key(kv[0]), reverse=reverse)

    def leading_term(self) -> tuple[Exponents, FieldElement]:
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        key = monomial_key(self.varset.m)
        exps = max(self.terms, key=key)
        return exps, self.terms[exps]

    def canonical_key(self):
        return tuple((monomial_key(self.varset.m)(e), c.sort_key()) for e, c in self.sorted_terms())

    # -- ring operations ---------------------------------------------------

    def _check(self, other: "MultiPoly") -> None:
        if self.varset != other.varset or self.field != other.field:
            raise VarSetMismatchError(
                f"ring mismatch: {self.varset!r}/{self.field!r} vs {other.varset!r}/{other.field!r}"
            )

    def __add__(self, other: "MultiPoly") -> "MultiPoly":
        self._check(other)
        terms = dict(self.terms)
        for exps, coef in other.terms.items():
            cur = terms.get(exps)
            s = coef if cur is None else cur + coef
            if s.is_zero():
                terms.pop(exps, None)
            else:
                terms[exps] = s
        return MultiPoly(self.varset, self.field, terms)

    def __sub__(self, other: "MultiPoly") -> "MultiPoly":
        self._check(other)
        terms = dict(self.terms)
        for exps, coef in other.terms.items():
            cur = terms.get(exps)
            s = -coef if cur is None else cur - coef
            if s.is_zero():
                terms.pop(exps, None)
            else:
                terms[exps] = s
        return MultiPoly(self.varset, self.field, terms)

    def __neg__(self) -> "MultiPoly":
        return MultiPoly(self.varset, self.field, {e: -c for e, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.field.from_rational(other)
        if isinstance(other, FieldElement):
            return self.scale(other)
        self._check(other)
        if len(self.terms) * len(other.terms) > 4 * MAX_TERMS:
            raise TooDenseError("product would exceed the dense-term guard")
        terms: dict[Exponents, FieldElement] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                exps = tuple(a + b for a, b in zip(e1, e2))
                prod = c1 * c2
                cur = terms.get(exps)
                s = prod if cur is None else cur + prod
                if s.is_zero():
                    terms.pop(exps, None)
                else:
                    terms[exps] = s
        return MultiPoly(self.varset, self.field, terms)

    __rmul__ = __mul__

    def scale(self, coef: FieldElement) -> "MultiPoly":
        if coef.is_zero():
            return MultiPoly.zero(self.varset, self.field)
        return MultiPoly(self.varset, self.field, {e: c * coef for e, c in self.terms.items()})

    def __pow__(self, n: int) -> "MultiPoly":
        if n < 0:
            raise ValueError("negative power")
        out = MultiPoly.constant(self.varset, self.field, 1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base if n > 1 else base
            n >>= 1
        return out

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self.varset == other.varset and self.field == other.field and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.varset, self.field, frozenset(self.terms.items())))

    def __repr__(self) -> str:
        from .parsing import format_poly

        return f"MultiPoly({format_poly(self)})"

    def __str__(self) -> str:
        from .parsing import format_poly

        return format_poly(self)

    # -- calculus ------------------------------------------------------------

    def diff(self, index: int) -> "MultiPoly":
        """Formal partial derivative with respect to variable `index` (1-based)."""
        if not 1 <= index <= self.varset.n:
            raise IndexError(f"variable index {index} out of range 1..{self.varset.n}")
        i = index - 1
        terms: dict[Exponents, FieldElement] = {}
        for exps, coef in self.terms.items():
            a = exps[i]
            if a == 0:
                continue
            new = list(exps)
            new[i] = a - 1
            terms[tuple(new)] = coef * a
        return MultiPoly(self.varset, self.field, terms)

    def evaluate(self, point: Sequence[FieldElement]) -> FieldElement:
        if len(point) != self.varset.n:
            raise ValueError(f"point must have {self.varset.n} coordinates")
        total = self.field.zero()
        for exps, coef in self.terms.items():
            val = coef
            for x, a in zip(point, exps):
                for _ in range(a):
                    val = val * x
            total = total + val
        return total

    # -- gamma grading ----------------------------------------------------------

    def gamma_degree(self, direction: Direction) -> int | None:
        """Max weighted degree over terms; None stands for -infinity (zero poly)."""
        if not self.terms:
            return None
        return max(direction.weight(e) for e in self.terms)

    def gamma_decompose(self, direction: Direction) -> list[tuple[int, "MultiPoly"]]:
        """Split into gamma-homogeneous components, degrees strictly increasing."""
        buckets: dict[int, dict[Exponents, FieldElement]] = {}
        for exps, coef in self.terms.items():
            buckets.setdefault(direction.weight(exps), {})[exps] = coef
        return [
            (s, MultiPoly(self.varset, self.field, buckets[s])) for s in sorted(buckets)
        ]

    def gamma_top(self, direction: Direction) -> "MultiPoly":
        parts = self.gamma_decompose(direction)
        if not parts:
            return self
        return parts[-1][1]

    def is_gamma_homogeneous(self, direction: Direction) -> bool:
        return len({direction.weight(e) for e in self.terms}) <= 1

    # -- division and normalisation ------------------------------------------

    def monic(self) -> "MultiPoly":
        if self.is_zero():
            return self
        _, lead = self.leading_term()
        return self.scale(lead.inverse())

    def divide_exact(self, other: "MultiPoly") -> "MultiPoly | None":
        """Exact quotient self/other, or None when no polynomial quotient exists."""
        self._check(other)
        if other.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        if self.is_zero():
            return MultiPoly.zero(self.varset, self.field)
        lexps, lcoef = other.leading_term()
        lcoef_inv = lcoef.inverse()
        key = monomial_key(self.varset.m)
        quotient: dict[Exponents, FieldElement] = {}
        rem = self
        while not rem.is_zero():
            rexps, rcoef = rem.leading_term()
            diff = tuple(a - b for a, b in zip(rexps, lexps))
            if any(d < 0 for d in diff):
                return None
            qc = rcoef * lcoef_inv
            quotient[diff] = qc
            piece = MultiPoly(self.varset, self.field, {diff: qc})
            rem = rem - piece * other
            if not rem.is_zero() and key(rem.leading_term()[0]) >= key(rexps):
                raise AssertionError("division did not reduce the leading term")  # pragma: no cover
        return MultiPoly(self.varset, self.field, quotient)


# -- multivariate gcd (primitive pseudo-remainder sequence) --------------------


def _coeffs_in_var(A: MultiPoly, index: int) -> dict[int, MultiPoly]:
    """View A as a univariate polynomial in variable `index` over the others."""
    i = index - 1
    out: dict[int, dict[Exponents, FieldElement]] = {}
    for exps, coef in A.terms.items():
        deg = exps[i]
        rest = list(exps)
        rest[i] = 0
        out.setdefault(deg, {})[tuple(rest)] = coef
    return {d: MultiPoly(A.varset, A.field, t) for d, t in out.items()}


def _from_coeffs(varset: VarSet, field: FieldSpec, index: int, coeffs: dict[int, MultiPoly]) -> MultiPoly:
    i = index - 1
    terms: dict[Exponents, FieldElement] = {}
    for deg, poly in coeffs.items():
        for exps, coef in poly.terms.items():
            new = list(exps)
            new[i] = deg
            terms[tuple(new)] = coef
    return MultiPoly(varset, field, terms)


def _pseudo_remainder(A: MultiPoly, B: MultiPoly, index: int) -> MultiPoly:
    """lc(B)^(deg A - deg B + 1) * A mod B, in the main variable `index`."""
    cb = _coeffs_in_var(B, index)
    db = max(cb)
    lb = cb[db]
    x = MultiPoly.variable(A.varset, A.field, index)
    rem = A
    n = max(_coeffs_in_var(A, index)) - db + 1
    while not rem.is_zero():
        cr = _coeffs_in_var(rem, index)
        dr = max(cr)
        if dr < db:
            break
        rem = rem * lb - cr[dr] * (x ** (dr - db)) * B
        n -= 1
    for _ in range(max(n, 0)):
        rem = rem * lb
    return rem


def _content(A: MultiPoly, index: int) -> MultiPoly:
    coeffs = list(_coeffs_in_var(A, index).values())
    g = coeffs[0]
    for c in coeffs[1:]:
        g = multivariate_gcd(g, c, _monic=False)
        if g.is_constant():
            break
    return g


def multivariate_gcd(A: MultiPoly, B: MultiPoly, _monic: bool = True) -> MultiPoly:
    """A greatest common divisor, monic-normalised in the canonical order."""
    A._check(B)

    def finish(G: MultiPoly) -> MultiPoly:
        return G.monic() if _monic else G

    if A.is_zero():
        return finish(B)
    if B.is_zero():
        return finish(A)
    if A.is_constant() or B.is_constant():
        return MultiPoly.constant(A.varset, A.field, 1)
    common = A.variables_used() & B.variables_used()
    if not common:
        return MultiPoly.constant(A.varset, A.field, 1)
    x = max(common)
    in_a = x in A.variables_used()
    in_b = x in B.variables_used()
    if not (in_a and in_b):
        # x occurs in only one input: gcd lives in the content of that one
        src, other = (A, B) if in_a else (B, A)
        return finish(multivariate_gcd(_content(src, x), other, _monic=False))
    cont_a = _content(A, x)
    cont_b = _content(B, x)
    cont_g = multivariate_gcd(cont_a, cont_b, _monic=False)
    pa = A.divide_exact(cont_a)
    pb = B.divide_exact(cont_b)
    assert pa is not None and pb is not None
    # primitive PRS in the main variable
    da = max(_coeffs_in_var(pa, x))
    db = max(_coeffs_in_var(pb, x))
    if da < db:
        pa, pb = pb, pa
    while not pb.is_zero():
        rem = _pseudo_remainder(pa, pb, x)
        pa = pb
        if rem.is_zero():
            pb = rem
        else:
            pb = rem.divide_exact(_content(rem, x))
            assert pb is not None
    if pa.variables_used() and x in pa.variables_used():
        pa = pa.divide_exact(_content(pa, x))
        assert pa is not None
    return finish(cont_g * pa)
