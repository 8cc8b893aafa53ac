"""Bounded-degree Darboux polynomial search.

The ansatz couples unknown coefficients f of the candidate polynomial with
unknown cofactor coefficients lam: the relation L_H F - Lambda*F = 0, read
per monomial, is linear in f with entries affine in lam.  The f-unknowns are
eliminated fraction-free over the polynomial ring in lam, branching on
whether each pivot vanishes; univariate lam-constraints of degree <= 4 are
factored over the configured field, in-field roots branch the search and
out-of-field factors are reported as residual conditions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dataclass_field
from fractions import Fraction

import sympy as sp

from .darboux import DarbouxCertificate, cofactor_of
from .field import FieldElement, FieldKind, FieldSpec
from .hamsys import (
    NaturalHamiltonian,
    gamma_direction,
    is_homogeneous_potential,
    lie_derivative,
)
from .poly import Exponents, MultiPoly, monomial_key


class BranchCapExceededError(RuntimeError):
    """Search aborted; carries the partial report gathered so far."""

    def __init__(self, partial: "SearchReport"):
        super().__init__(
            f"branch cap exceeded after {partial.branches_explored} branches"
        )
        self.partial = partial


@dataclass(frozen=True)
class SearchReport:
    certificates: tuple[DarbouxCertificate, ...]
    branches_explored: int
    residual_conditions: tuple[str, ...]


# -- sympy bridge (exact roots over Q and Q(i, sqrt d)) -------------------------


def _fe_to_sympy(x: FieldElement):
    expr = sp.Rational(x.a)
    if x.b or x.c or x.e:
        s = sp.sqrt(x.spec.d)
        expr = expr + sp.Rational(x.b) * sp.I + sp.Rational(x.c) * s + sp.Rational(x.e) * sp.I * s
    return expr


def _sympy_to_fe(expr, spec: FieldSpec) -> FieldElement:
    expr = sp.expand(expr)
    if spec.kind is FieldKind.RATIONALS:
        rat = sp.Rational(expr)
        return spec.from_rational(Fraction(rat.p, rat.q))
    s = sp.sqrt(spec.d)
    poly = sp.Poly(expr, sp.I, s)
    comps = {(0, 0): Fraction(0), (1, 0): Fraction(0), (0, 1): Fraction(0), (1, 1): Fraction(0)}
    for monom, coef in poly.terms():
        if monom not in comps or not coef.is_rational:
            raise ValueError(f"{expr} does not lie in Q(i,sqrt{spec.d})")
        rat = sp.Rational(coef)
        comps[monom] = Fraction(rat.p, rat.q)
    return spec.element(comps[(0, 0)], comps[(1, 0)], comps[(0, 1)], comps[(1, 1)])


def roots_in_field(
    coeffs: list[FieldElement], spec: FieldSpec
) -> tuple[list[FieldElement], list[list[FieldElement]]]:
    """Roots of sum coeffs[k] x^k lying in the field, plus the monic
    irreducible-over-the-field factors whose roots fall outside it."""
    x = sp.Symbol("x")
    expr = sp.Add(*(_fe_to_sympy(c) * x**k for k, c in enumerate(coeffs)))
    if spec.kind is FieldKind.QUAD_GAUSS:
        _, factors = sp.factor_list(expr, x, extension=[sp.I, sp.sqrt(spec.d)])
    else:
        _, factors = sp.factor_list(expr, x)
    roots: list[FieldElement] = []
    residuals: list[list[FieldElement]] = []
    for fac, _mult in factors:
        poly = sp.Poly(fac, x)
        if poly.degree() == 0:
            continue
        if poly.degree() == 1:
            c1, c0 = poly.all_coeffs()
            roots.append(_sympy_to_fe(sp.cancel(-sp.sympify(c0) / sp.sympify(c1)), spec))
        else:
            fe_coeffs = [_sympy_to_fe(c, spec) for c in reversed(poly.all_coeffs())]
            lead = fe_coeffs[-1].inverse()
            residuals.append([c * lead for c in fe_coeffs])
    uniq: list[FieldElement] = []
    for r in sorted(roots, key=lambda z: z.sort_key()):
        if not uniq or uniq[-1] != r:
            uniq.append(r)
    return uniq, residuals


def sqrt_in_field(x: FieldElement) -> FieldElement | None:
    """A square root of x in its own field, or None."""
    if x.is_zero():
        return x
    roots, _ = roots_in_field([-x, x.spec.zero(), x.spec.one()], x.spec)
    return roots[0] if roots else None


# -- polynomials in the cofactor unknowns ---------------------------------------


class PPoly:
    """Sparse polynomial in the lam-unknowns over the coefficient field."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: dict[tuple[int, ...], FieldElement]):
        self.nvars = nvars
        self.terms = terms

    @classmethod
    def const(cls, nvars: int, value: FieldElement) -> "PPoly":
        if value.is_zero():
            return cls(nvars, {})
        return cls(nvars, {(0,) * nvars: value})

    @classmethod
    def var(cls, nvars: int, index: int, spec: FieldSpec) -> "PPoly":
        exps = [0] * nvars
        exps[index] = 1
        return cls(nvars, {tuple(exps): spec.one()})

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and not any(next(iter(self.terms))))

    def constant_value(self) -> FieldElement:
        return next(iter(self.terms.values()))

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def vars_used(self) -> set[int]:
        used: set[int] = set()
        for exps in self.terms:
            for i, a in enumerate(exps):
                if a:
                    used.add(i)
        return used

    def key(self):
        return tuple(sorted((e, c.sort_key()) for e, c in self.terms.items()))

    def __add__(self, other: "PPoly") -> "PPoly":
        terms = dict(self.terms)
        for e, c in other.terms.items():
            cur = terms.get(e)
            s = c if cur is None else cur + c
            if s.is_zero():
                terms.pop(e, None)
            else:
                terms[e] = s
        return PPoly(self.nvars, terms)

    def __sub__(self, other: "PPoly") -> "PPoly":
        return self + (-other)

    def __neg__(self) -> "PPoly":
        return PPoly(self.nvars, {e: -c for e, c in self.terms.items()})

    def __mul__(self, other: "PPoly") -> "PPoly":
        terms: dict[tuple[int, ...], FieldElement] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                prod = c1 * c2
                cur = terms.get(e)
                s = prod if cur is None else cur + prod
                if s.is_zero():
                    terms.pop(e, None)
                else:
                    terms[e] = s
        return PPoly(self.nvars, terms)

    def scale(self, coef: FieldElement) -> "PPoly":
        if coef.is_zero():
            return PPoly(self.nvars, {})
        return PPoly(self.nvars, {e: c * coef for e, c in self.terms.items()})

    def substitute(self, assign: dict[int, FieldElement], spec: FieldSpec) -> "PPoly":
        if not assign or not (self.vars_used() & assign.keys()):
            return self
        terms: dict[tuple[int, ...], FieldElement] = {}
        for exps, coef in self.terms.items():
            val = coef
            new = list(exps)
            for i, a in enumerate(exps):
                if a and i in assign:
                    for _ in range(a):
                        val = val * assign[i]
                    new[i] = 0
            if val.is_zero():
                continue
            e = tuple(new)
            cur = terms.get(e)
            s = val if cur is None else cur + val
            if s.is_zero():
                terms.pop(e, None)
            else:
                terms[e] = s
        return PPoly(self.nvars, terms)

    def leading(self) -> tuple[tuple[int, ...], FieldElement]:
        exps = max(self.terms)
        return exps, self.terms[exps]

    def divide_exact(self, other: "PPoly") -> "PPoly | None":
        """self / other when the division is exact, else None."""
        if other.is_zero():
            raise ZeroDivisionError
        if other.is_constant():
            return self.scale(other.constant_value().inverse())
        remainder = self
        quotient = PPoly(self.nvars, {})
        dexps, dcoef = other.leading()
        dinv = dcoef.inverse()
        while not remainder.is_zero():
            rexps, rcoef = remainder.leading()
            step = tuple(a - b for a, b in zip(rexps, dexps))
            if any(a < 0 for a in step):
                return None
            t = PPoly(self.nvars, {step: rcoef * dinv})
            quotient = quotient + t
            remainder = remainder - t * other
        return quotient

    def univariate_coeffs(self) -> tuple[int, list[FieldElement]]:
        """(var index, low-to-high coefficient list); requires one variable."""
        used = self.vars_used()
        assert len(used) == 1
        var = next(iter(used))
        deg = max(e[var] for e in self.terms)
        spec = self.constant_spec()
        coeffs = [spec.zero() for _ in range(deg + 1)]
        for exps, coef in self.terms.items():
            coeffs[exps[var]] = coeffs[exps[var]] + coef
        return var, coeffs

    def constant_spec(self) -> FieldSpec:
        return next(iter(self.terms.values())).spec

    def render(self, names: list[str]) -> str:
        if not self.terms:
            return "0"
        from .parsing import _component_strs, format_field_element

        items = sorted(self.terms.items(), key=lambda kv: (sum(kv[0]), kv[0]), reverse=True)
        pieces = []
        for idx, (exps, coef) in enumerate(items):
            monos = []
            for i, a in enumerate(exps):
                if a:
                    monos.append(names[i] if a == 1 else f"{names[i]}^{a}")
            comps = _component_strs(coef)
            if len(comps) == 1:
                sign, mag = comps[0]
                body = "*".join(monos) if monos and mag == "1" else "*".join([mag] + monos)
            else:
                sign = 1
                body = "*".join(["(" + format_field_element(coef) + ")"] + monos)
            if idx == 0:
                pieces.append(("-" if sign < 0 else "") + body)
            else:
                pieces.append(("- " if sign < 0 else "+ ") + body)
        return " ".join(pieces)


# -- ansatz enumeration ----------------------------------------------------------


def _monomials_up_to_weight(
    weights: tuple[int, ...], bound: int, exact: bool
) -> list[Exponents]:
    out: list[Exponents] = []

    def rec(i: int, remaining: int, prefix: list[int]) -> None:
        if i == len(weights):
            if not exact or remaining == 0:
                out.append(tuple(prefix))
            return
        w = weights[i]
        for a in range(remaining // w + 1):
            prefix.append(a)
            rec(i + 1, remaining - a * w, prefix)
            prefix.pop()

    rec(0, bound, [])
    return out


# -- the branching elimination ----------------------------------------------------


@dataclass
class _State:
    rows: list[dict[int, PPoly] | None]
    assign: dict[int, FieldElement]
    nonzero: list[PPoly]
    pending: list[PPoly]
    prev_pivot: PPoly | None = None

    def clone(self) -> "_State":
        return _State(
            rows=[dict(r) if r is not None else None for r in self.rows],
            assign=dict(self.assign),
            nonzero=list(self.nonzero),
            pending=list(self.pending),
            prev_pivot=self.prev_pivot,
        )


@dataclass
class _Context:
    sys: NaturalHamiltonian
    f_monomials: list[Exponents]
    lam_monomials: list[Exponents]
    lam_names: list[str]
    original_rows: list[dict[int, PPoly]]
    ncols: int
    cap: int
    branches: int = 0
    certificates: dict = dataclass_field(default_factory=dict)
    residuals: set = dataclass_field(default_factory=set)

    def tick(self) -> None:
        self.branches += 1
        if self.branches > self.cap:
            raise BranchCapExceededError(self.report())

    def report(self) -> SearchReport:
        certs = sorted(
            self.certificates.values(),
            key=lambda c: (c.F.canonical_key(), c.Lambda.canonical_key()),
        )
        return SearchReport(
            certificates=tuple(certs),
            branches_explored=self.branches,
            residual_conditions=tuple(sorted(self.residuals)),
        )


def _substitute_state(ctx: _Context, state: _State, var: int, value: FieldElement) -> list[_State]:
    """Assign one lam variable, substitute everywhere, re-examine assumptions
    and pending constraints.  May fork (pending constraints gaining roots) or
    die (a nonzero assumption vanishing)."""
    spec = ctx.sys.field
    state.assign[var] = value
    if state.prev_pivot is not None:
        state.prev_pivot = state.prev_pivot.substitute(state.assign, spec)
        if state.prev_pivot.is_zero():
            return []
    for row in state.rows:
        if row is None:
            continue
        for col in list(row):
            p = row[col].substitute(state.assign, spec)
            if p.is_zero():
                del row[col]
            else:
                row[col] = p
    new_nonzero = []
    for p in state.nonzero:
        p = p.substitute(state.assign, spec)
        if p.is_zero():
            return []
        if not p.is_constant():
            new_nonzero.append(p)
    state.nonzero = new_nonzero
    pending = state.pending
    state.pending = []
    states = [state]
    for p in pending:
        nxt: list[_State] = []
        for s in states:
            nxt.extend(_apply_constraint(ctx, s, p.substitute(s.assign, spec)))
        states = nxt
    return states


def _apply_constraint(ctx: _Context, state: _State, p: PPoly) -> list[_State]:
    """Impose p = 0 on the branch.  Univariate constraints are factored over
    the field; each in-field root forks a branch, out-of-field factors are
    recorded as residual conditions."""
    if p.is_zero():
        return [state]
    if p.is_constant():
        return []
    used = p.vars_used()
    if len(used) > 1:
        if len(p.terms) == 1:
            # a monomial vanishes iff one of its variables does
            out_m: list[_State] = []
            for v in sorted(used):
                ctx.tick()
                out_m.extend(
                    _substitute_state(ctx, state.clone(), v, ctx.sys.field.zero())
                )
            return out_m
        state.pending.append(p)
        return [state]
    var, coeffs = p.univariate_coeffs()
    roots, residual_factors = roots_in_field(coeffs, ctx.sys.field)
    for fac in residual_factors:
        nvars = p.nvars
        rendered = PPoly(
            nvars,
            {
                tuple(deg if i == var else 0 for i in range(nvars)): c
                for deg, c in enumerate(fac)
                if not c.is_zero()
            },
        ).render(ctx.lam_names)
        ctx.residuals.add(rendered)
    out: list[_State] = []
    for root in roots:
        ctx.tick()
        out.extend(_substitute_state(ctx, state.clone(), var, root))
    return out


def _strip_row_content(row: dict[int, PPoly]) -> dict[int, PPoly]:
    """Scale a row to primitive form: common rational content removed."""
    num_gcd = 0
    den_lcm = 1
    for p in row.values():
        for coef in p.terms.values():
            for comp in coef.components():
                if comp:
                    num_gcd = math.gcd(num_gcd, comp.numerator)
                    den_lcm = den_lcm * comp.denominator // math.gcd(
                        den_lcm, comp.denominator
                    )
    if num_gcd in (0, den_lcm):
        return row
    factor = Fraction(den_lcm, num_gcd)
    if factor == 1:
        return row
    spec = next(iter(next(iter(row.values())).terms.values())).spec
    scale = spec.from_rational(factor)
    return {c: p.scale(scale) for c, p in row.items()}


def _dense_int(p: PPoly) -> list[int] | None:
    """Univariate polynomial as a dense integer coefficient list, or None."""
    if p.nvars != 1:
        return None
    deg = 0
    for exps in p.terms:
        if exps[0] > deg:
            deg = exps[0]
    out = [0] * (deg + 1)
    for exps, c in p.terms.items():
        if c.b or c.c or c.e:
            return None
        f = c.a
        if f.denominator != 1:
            return None
        out[exps[0]] = f.numerator
    return out


def _from_dense(vec: list[int], spec: FieldSpec) -> PPoly:
    return PPoly(1, {(e,): spec.from_rational(n) for e, n in enumerate(vec) if n})


def _conv(a: list[int], b: list[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] += x * y
    return out


def _trim(v: list[int]) -> list[int]:
    n = len(v)
    while n and not v[n - 1]:
        n -= 1
    del v[n:]
    return v


def _int_div_exact(num: list[int], den: list[int]) -> tuple[list[int], int] | None:
    """num/den in Q[x] as (integer quotient, positive denominator), or None
    when the polynomial division leaves a remainder."""
    d = len(den)
    shift = len(num) - d
    if shift < 0:
        return None
    dlc = den[-1]
    for scale in (1, dlc ** (shift + 1)):
        work = [x * scale for x in num]
        quot = [0] * (shift + 1)
        ok = True
        for k in range(shift, -1, -1):
            lead = work[k + d - 1]
            if lead % dlc:
                ok = False
                break
            c = lead // dlc
            quot[k] = c
            if c:
                for j in range(d):
                    work[k + j] -= c * den[j]
        if not ok:
            continue
        if any(work):
            return None
        if scale < 0:
            scale = -scale
            quot = [-x for x in quot]
        return quot, scale
    return None


def _eliminate_fast(state: _State, col: int, pivot_ri: int) -> bool:
    """Integer specialization of the Bareiss step for a single lam-unknown
    over Q: dense int coefficient lists instead of PPoly dicts.  Returns
    False (without touching the state) when any entry does not convert."""
    rows = state.rows
    pivot_row = rows[pivot_ri]
    assert pivot_row is not None
    pv_poly = pivot_row[col]
    spec = pv_poly.constant_spec()
    if spec.kind is not FieldKind.RATIONALS:
        return False
    prev = state.prev_pivot
    prevv: list[int] | None = None
    if prev is not None:
        prevv = _dense_int(prev)
        if prevv is None:
            return False
    pr: dict[int, list[int]] = {}
    for c, p in pivot_row.items():
        v = _dense_int(p)
        if v is None:
            return False
        pr[c] = v
    others: dict[int, dict[int, list[int]]] = {}
    for rj, row in enumerate(rows):
        if rj == pivot_ri or row is None:
            continue
        rd: dict[int, list[int]] = {}
        for c, p in row.items():
            v = _dense_int(p)
            if v is None:
                return False
            rd[c] = v
        others[rj] = rd
    # conversion complete: commit
    rows[pivot_ri] = None
    pvv = pr.pop(col)
    skip_untouched = len(pvv) == 1 and (prevv is None or len(prevv) == 1)
    for rj, rd in others.items():
        e = rd.pop(col, None)
        if e is None and skip_untouched:
            continue
        newd: dict[int, tuple[list[int], int]] = {}
        columns = (set(rd) | set(pr)) if e is not None else rd.keys()
        for c in columns:
            a = rd.get(c)
            b = pr.get(c) if e is not None else None
            if a is not None and b is not None:
                val = _conv(pvv, a)
                sub = _conv(e, b)  # type: ignore[arg-type]
                if len(sub) > len(val):
                    val.extend([0] * (len(sub) - len(val)))
                for i, y in enumerate(sub):
                    val[i] -= y
            elif a is not None:
                val = _conv(pvv, a)
            else:
                val = [-y for y in _conv(e, b)]  # type: ignore[arg-type]
            _trim(val)
            if val:
                newd[c] = (val, 1)
        if prevv is not None:
            if len(prevv) == 1:
                d0 = prevv[0]
                newd = {c: (vec, den * d0) for c, (vec, den) in newd.items()}
            else:
                reduced: dict[int, tuple[list[int], int]] | None = {}
                for c, (vec, den) in newd.items():
                    q = _int_div_exact(vec, prevv)
                    if q is None:
                        reduced = None
                        break
                    reduced[c] = (q[0], den * q[1])
                if reduced is not None:
                    newd = reduced
        # strip rational content: one common positive denominator, then gcd
        den_lcm = 1
        for _, den in newd.values():
            den = abs(den)
            den_lcm = den_lcm * den // math.gcd(den_lcm, den)
        g = 0
        scaled: dict[int, list[int]] = {}
        for c, (vec, den) in newd.items():
            mult = den_lcm // den  # keeps the sign of den
            if mult != 1:
                vec = [x * mult for x in vec]
            scaled[c] = vec
            for x in vec:
                if x:
                    g = math.gcd(g, x)
        if g > 1:
            scaled = {c: [x // g for x in vec] for c, vec in scaled.items()}
        row = rows[rj]
        assert row is not None
        row.clear()
        row.update({c: _from_dense(vec, spec) for c, vec in scaled.items()})
    state.prev_pivot = pv_poly
    return True


def _eliminate_with_pivot(state: _State, col: int, pivot_ri: int) -> None:
    """Fraction-free (Bareiss) elimination of one column.  Every new entry is
    pv*a - e*b, then the whole row is divided by the previous pivot when that
    division is exact; the previous pivot is nonzero on this branch, so the
    division never changes which lam-values admit a kernel."""
    if _eliminate_fast(state, col, pivot_ri):
        return
    rows = state.rows
    pivot_row = rows[pivot_ri]
    assert pivot_row is not None
    rows[pivot_ri] = None
    pv = pivot_row.pop(col)
    prev = state.prev_pivot
    prev_inv = None
    if prev is not None and prev.is_constant():
        prev_inv = prev.constant_value().inverse()
    # rows without a pivot-column entry only need the pv/prev rescaling, and
    # a constant rescaling is irrelevant to both the kernel and later exact
    # divisions, so the all-constant case skips them entirely
    skip_untouched = pv.is_constant() and (prev is None or prev.is_constant())
    for rj, row in enumerate(rows):
        if row is None:
            continue
        e = row.pop(col, None)
        if e is None and skip_untouched:
            continue
        new_row: dict[int, PPoly] = {}
        columns = (set(row) | set(pivot_row)) if e is not None else row.keys()
        for c in columns:
            a = row.get(c)
            b = pivot_row.get(c) if e is not None else None
            val = (pv * a if a is not None else None)
            sub = (e * b if b is not None else None)
            if val is None:
                new = -sub  # type: ignore[operator]
            elif sub is None:
                new = val
            else:
                new = val - sub
            if not new.is_zero():
                new_row[c] = new
        if prev_inv is not None:
            new_row = {c: p.scale(prev_inv) for c, p in new_row.items()}
        elif prev is not None:
            reduced: dict[int, PPoly] | None = {}
            for c, p in new_row.items():
                q = p.divide_exact(prev)
                if q is None:
                    reduced = None
                    break
                reduced[c] = q
            if reduced is not None:
                new_row = reduced
        if new_row:
            new_row = _strip_row_content(new_row)
        row.clear()
        row.update(new_row)
    state.prev_pivot = pv


def _explore(ctx: _Context, state: _State) -> None:
    while True:
        rows = state.rows
        # eliminate every column that admits a constant pivot before touching
        # any lam-bearing one: constant steps never branch and shrink the
        # system; sparse rows first (Markowitz) to limit fill-in
        while True:
            best = None
            for ri, row in enumerate(rows):
                if not row:
                    continue
                size = len(row)
                if best is not None and size >= best[0]:
                    continue
                for col, p in row.items():
                    if p.is_constant():
                        cand = (size, col, ri)
                        if best is None or cand < best:
                            best = cand
                        break
            if best is None:
                break
            _eliminate_with_pivot(state, best[1], best[2])
        # pick the lam-bearing column with the fewest, lowest-degree entries
        occupancy: dict[int, list[tuple[int, PPoly]]] = {}
        for ri, row in enumerate(rows):
            if not row:
                continue
            for col, p in row.items():
                occupancy.setdefault(col, []).append((ri, p))
        if not occupancy:
            break
        col = min(
            occupancy,
            key=lambda c: (
                len(occupancy[c]),
                min(p.total_degree() for _, p in occupancy[c]),
                c,
            ),
        )
        entries = occupancy[col]
        candidates = sorted(
            entries,
            key=lambda rp: (rp[1].total_degree(), len(rows[rp[0]] or ()), rp[1].key(), rp[0]),
        )
        eq_states = [state]  # branches in which the candidates seen so far vanish
        for ri, _ in candidates:
            next_eq: list[_State] = []
            for s in eq_states:
                row = s.rows[ri]
                p = row.get(col) if row is not None else None
                if p is None or p.is_zero():
                    next_eq.append(s)
                    continue
                if p.is_constant():
                    ctx.tick()
                    s2 = s.clone()
                    _eliminate_with_pivot(s2, col, ri)
                    _explore(ctx, s2)
                    continue
                # branch A: pivot nonzero
                ctx.tick()
                s_nz = s.clone()
                s_nz.nonzero.append(p)
                _eliminate_with_pivot(s_nz, col, ri)
                _explore(ctx, s_nz)
                # branch B: pivot vanishes; drop the entry so the column is
                # not revisited (the pending constraint keeps it at zero)
                s_eq0 = s.clone()
                eq_row = s_eq0.rows[ri]
                if eq_row is not None:
                    eq_row.pop(col, None)
                for s_eq in _apply_constraint(ctx, s_eq0, p):
                    next_eq.append(s_eq)
            eq_states = next_eq
        # whole column vanished: the corresponding f-unknown stays unconstrained here
        survivors = eq_states
        if not survivors:
            return
        state = survivors[0]
        for extra in survivors[1:]:
            _explore(ctx, extra)
    _handle_leaf(ctx, state)


_FREE_SAMPLES = (0, 1, -1, 2)


def _handle_leaf(ctx: _Context, state: _State) -> None:
    spec = ctx.sys.field
    if state.pending:
        for p in state.pending:
            ctx.residuals.add(p.render(ctx.lam_names))
        return
    free = [i for i in range(len(ctx.lam_monomials)) if i not in state.assign]
    assign = dict(state.assign)
    if free:
        for sample in _FREE_SAMPLES:
            trial = dict(assign)
            for i in free:
                trial[i] = spec.from_rational(sample)
            if all(
                not p.substitute(trial, spec).is_zero() for p in state.nonzero
            ):
                assign = trial
                break
        else:
            return
    else:
        for p in state.nonzero:
            if p.substitute(assign, spec).is_zero():
                return
    numeric_rows: list[dict[int, FieldElement]] = []
    for row in ctx.original_rows:
        nrow: dict[int, FieldElement] = {}
        for col, p in row.items():
            p2 = p.substitute(assign, spec)
            if p2.is_zero():
                continue
            assert p2.is_constant()
            nrow[col] = p2.constant_value()
        if nrow:
            numeric_rows.append(nrow)
    for vector in _kernel_basis(numeric_rows, ctx.ncols, spec):
        F = MultiPoly.from_terms(
            ctx.sys.varset,
            spec,
            ((ctx.f_monomials[j], coef) for j, coef in vector.items()),
        )
        if F.is_zero() or F.is_constant():
            continue
        cert = cofactor_of(ctx.sys, F.monic())
        if cert is None:
            continue  # pragma: no cover - kernel vectors are Darboux by construction
        key = (cert.F.canonical_key(), cert.Lambda.canonical_key())
        ctx.certificates.setdefault(key, cert)


def _kernel_basis(
    rows: list[dict[int, FieldElement]], ncols: int, spec: FieldSpec
) -> list[dict[int, FieldElement]]:
    """Nullspace basis of a sparse matrix over the field (reduced echelon)."""
    pivots: dict[int, dict[int, FieldElement]] = {}
    for row in rows:
        r = dict(row)
        while r:
            lead = min(r)
            if lead in pivots:
                coef = r.pop(lead)
                for c, v in pivots[lead].items():
                    if c == lead:
                        continue
                    cur = r.get(c)
                    new = -coef * v if cur is None else cur - coef * v
                    if new.is_zero():
                        r.pop(c, None)
                    else:
                        r[c] = new
            else:
                inv = r[lead].inverse()
                pivots[lead] = {c: v * inv for c, v in r.items()}
                break
    # back-substitute to reduced form
    for lead in sorted(pivots, reverse=True):
        prow = pivots[lead]
        for other_lead, row in pivots.items():
            if other_lead == lead or lead not in row:
                continue
            coef = row.pop(lead)
            for c, v in prow.items():
                if c == lead:
                    continue
                cur = row.get(c)
                new = -coef * v if cur is None else cur - coef * v
                if new.is_zero():
                    row.pop(c, None)
                else:
                    row[c] = new
    basis = []
    free_cols = [c for c in range(ncols) if c not in pivots]
    for fc in free_cols:
        vec: dict[int, FieldElement] = {fc: spec.one()}
        for lead, row in pivots.items():
            coef = row.get(fc)
            if coef is not None:
                vec[lead] = -coef
        basis.append(vec)
    return basis


# -- public entry point -------------------------------------------------------------


def search_darboux(
    sys: NaturalHamiltonian,
    max_gamma_degree: int,
    homogeneous_only: bool = False,
    branch_cap: int = 10_000,
) -> SearchReport:
    """Find all Darboux polynomials of bounded weighted degree, up to scalar.

    With homogeneous_only, the candidate is a gamma-form of exactly
    max_gamma_degree; otherwise all monomials up to that weight enter the
    ansatz.  The cofactor ansatz covers the q-monomials of weighted degree
    exactly r - 2 for a homogeneous potential, or everything up to r - 2
    (constant included) otherwise.
    """
    grading = gamma_direction(sys)
    gamma = grading.direction.gamma
    spec = sys.field
    m = sys.m

    f_monomials = [
        e
        for e in _monomials_up_to_weight(gamma, max_gamma_degree, exact=homogeneous_only)
    ]
    key = monomial_key(m)
    f_monomials.sort(key=key, reverse=True)
    ncols = len(f_monomials)

    q_weights = gamma[:m]
    homog = is_homogeneous_potential(sys)
    lam_q = _monomials_up_to_weight(q_weights, sys.r - 2, exact=homog)
    lam_monomials = [
        q + (0,) * m
        for q in sorted(lam_q, key=lambda e: key(e + (0,) * m), reverse=True)
    ]
    if homog:
        lam_monomials = [e for e in lam_monomials if grading.direction.weight(e) == sys.r - 2]
    nlam = len(lam_monomials)
    lam_names = [f"l{i + 1}" for i in range(nlam)]

    rows_by_monomial: dict[Exponents, dict[int, PPoly]] = {}

    def bump(mono: Exponents, col: int, delta: PPoly) -> None:
        row = rows_by_monomial.setdefault(mono, {})
        cur = row.get(col)
        new = delta if cur is None else cur + delta
        if new.is_zero():
            row.pop(col, None)
        else:
            row[col] = new

    for col, alpha in enumerate(f_monomials):
        mono_poly = MultiPoly(sys.varset, spec, {alpha: spec.one()})
        image = lie_derivative(sys, mono_poly)
        for exps, coef in image.terms.items():
            bump(exps, col, PPoly.const(nlam, coef))
        for t, beta in enumerate(lam_monomials):
            prod = tuple(a + b for a, b in zip(alpha, beta))
            bump(prod, col, PPoly.var(nlam, t, spec).scale(-spec.one()))

    ordered = sorted(rows_by_monomial, key=key, reverse=True)
    original_rows = [rows_by_monomial[mono] for mono in ordered]

    ctx = _Context(
        sys=sys,
        f_monomials=f_monomials,
        lam_monomials=lam_monomials,
        lam_names=lam_names,
        original_rows=original_rows,
        ncols=ncols,
        cap=branch_cap,
    )
    state = _State(
        rows=[dict(r) for r in original_rows],
        assign={},
        nonzero=[],
        pending=[],
    )
    ctx.tick()
    _explore(ctx, state)
    return ctx.report()
