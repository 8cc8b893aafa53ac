import random

import pytest
import sympy as sp

from hamdarboux.darboux import certificate_holds
from hamdarboux.field import RATIONALS, quad_gauss
from hamdarboux.parsing import format_poly
from hamdarboux.search import (
    BranchCapExceededError,
    roots_in_field,
    search_darboux,
    sqrt_in_field,
)

from conftest import poly_of

Q2 = quad_gauss(2)


def test_roots_in_field_rational():
    # (x - 2)(x + 3) over Q
    roots, residuals = roots_in_field(
        [RATIONALS.from_rational(-6), RATIONALS.from_rational(1), RATIONALS.one()],
        RATIONALS,
    )
    assert sorted(str(r) for r in roots) == ["-3", "2"]
    assert residuals == []
    # x^2 + 8 has no rational roots
    roots, residuals = roots_in_field(
        [RATIONALS.from_rational(8), RATIONALS.zero(), RATIONALS.one()], RATIONALS
    )
    assert roots == []
    assert len(residuals) == 1
    assert [str(c) for c in residuals[0]] == ["8", "0", "1"]


def test_roots_in_field_extension():
    # x^2 + 8 = (x - 2 i sqrt2)(x + 2 i sqrt2) over Q(i, sqrt2)
    roots, residuals = roots_in_field(
        [Q2.from_rational(8), Q2.zero(), Q2.one()], Q2
    )
    assert residuals == []
    assert sorted(str(r) for r in roots) == ["-2*i*sqrt(2)", "2*i*sqrt(2)"]
    # x^2 - 3 stays irreducible over Q(i, sqrt2)
    roots, residuals = roots_in_field(
        [Q2.from_rational(-3), Q2.zero(), Q2.one()], Q2
    )
    assert roots == []
    assert len(residuals) == 1


def test_roots_of_cubic_and_quartic():
    # degree > 2 constraints are handled, not just the quadratic case
    # (x - 1)(x^2 + 1) over Q and over Q(i, sqrt2)
    coeffs_q = [RATIONALS.from_rational(c) for c in (-1, 1, -1, 1)]
    roots, residuals = roots_in_field(coeffs_q, RATIONALS)
    assert [str(r) for r in roots] == ["1"]
    assert len(residuals) == 1
    coeffs_e = [Q2.from_rational(c) for c in (-1, 1, -1, 1)]
    roots, residuals = roots_in_field(coeffs_e, Q2)
    assert sorted(str(r) for r in roots) == ["-i", "1", "i"]
    assert residuals == []


def test_sqrt_in_field():
    assert str(sqrt_in_field(Q2.from_rational(2))) in ("sqrt(2)", "-sqrt(2)")
    assert sqrt_in_field(Q2.from_rational(-1)) is not None
    assert sqrt_in_field(Q2.from_rational(3)) is None
    assert sqrt_in_field(RATIONALS.from_rational(-1)) is None
    assert str(sqrt_in_field(RATIONALS.from_rational(4))) in ("2", "-2")


def test_search_v_q1_4_over_extension(sys_s1_ext):
    report = search_darboux(sys_s1_ext, 4)
    found = {(format_poly(c.F), format_poly(c.Lambda)) for c in report.certificates}
    assert found == {
        ("p2", "0"),
        ("p1 + i*sqrt(2)*q1^2", "2*i*sqrt(2)*q1"),
        ("p1 - i*sqrt(2)*q1^2", "-2*i*sqrt(2)*q1"),
    }
    assert report.residual_conditions == ()
    for cert in report.certificates:
        assert certificate_holds(sys_s1_ext, cert)


def test_search_v_q1_4_over_rationals(sys_s1):
    report = search_darboux(sys_s1, 4)
    found = {(format_poly(c.F), format_poly(c.Lambda)) for c in report.certificates}
    assert found == {("p2", "0")}
    assert report.residual_conditions == ("l1^2 + 8",)


def test_search_homogeneous_slice_matches(sys_s1_ext):
    report = search_darboux(sys_s1_ext, 4, homogeneous_only=True)
    found = {format_poly(c.F) for c in report.certificates}
    assert found == {"p2", "p1 + i*sqrt(2)*q1^2", "p1 - i*sqrt(2)*q1^2"}


def test_search_finds_angular_momentum(sys_s2):
    report = search_darboux(sys_s2, 6)
    found = {format_poly(c.F) for c in report.certificates}
    assert "-q2*p1 + q1*p2" in found or "q2*p1 - q1*p2" in found
    for cert in report.certificates:
        assert certificate_holds(sys_s2, cert)


def test_search_against_sympy_brute_force(sys_s1_ext):
    # independent oracle: solve L_H F = Lambda F for the full gamma-degree-4
    # ansatz with sympy over Q(i, sqrt2), then compare monic solution sets
    q1, q2, p1, p2, lam1, lam2 = sp.symbols("q1 q2 p1 p2 lam1 lam2")
    s2 = sp.sqrt(2)
    fs = sp.symbols("f0:8")
    monos = [p1, p2, q1**2, q1 * q2, q2**2, q1, q2, sp.Integer(1)]
    F = sum(f * mono for f, mono in zip(fs, monos))
    lam = lam1 * q1 + lam2 * q2
    LF = (
        p1 * sp.diff(F, q1)
        + p2 * sp.diff(F, q2)
        - 4 * q1**3 * sp.diff(F, p1)
    )
    eqs = sp.Poly(sp.expand(LF - lam * F), q1, q2, p1, p2).coeffs()
    sols = sp.solve(eqs, list(fs) + [lam1, lam2], dict=True)
    oracle = set()
    for sol in sols:
        Fsol = sp.expand(F.subs(sol))
        free = sorted(Fsol.free_symbols & set(fs), key=str)
        # enumerate one representative per free coefficient direction
        trials = []
        if not free:
            trials.append(Fsol)
        else:
            for g in free:
                trials.append(Fsol.subs([(g, 1)] + [(h, 0) for h in free if h != g]))
        for cand in trials:
            cand = sp.expand(cand.subs([(s, 0) for s in cand.free_symbols - {q1, q2, p1, p2, sp.I}]))
            if cand == 0 or cand.is_number:
                continue
            lead = sp.LC(sp.Poly(cand, p1, p2, q1, q2))
            oracle.add(sp.simplify(sp.expand(cand / lead)))
    report = search_darboux(sys_s1_ext, 4)
    got = set()
    for cert in report.certificates:
        expr = sp.sympify(
            format_poly(cert.F).replace("sqrt(2)", "s2").replace("i*", "I*").replace("^", "**"),
            locals={"q1": q1, "q2": q2, "p1": p1, "p2": p2, "s2": s2},
        )
        got.add(sp.simplify(sp.expand(expr)))
    for expr in got:
        assert any(sp.simplify(expr - o) == 0 for o in oracle), expr
    assert len(got) == 3


def test_branch_cap():
    with pytest.raises(BranchCapExceededError) as info:
        search_darboux(
            poly_system(), 8, branch_cap=2
        )
    assert info.value.partial.branches_explored >= 2


def poly_system():
    from hamdarboux.hamsys import load_system

    return load_system("m = 2\nfield = Q(i,sqrt2)\nmu = 1, 1\nV = q1^4 + q2^4\n")


def test_search_is_deterministic(sys_s1_ext):
    a = search_darboux(sys_s1_ext, 4)
    b = search_darboux(sys_s1_ext, 4)
    assert [format_poly(c.F) for c in a.certificates] == [
        format_poly(c.F) for c in b.certificates
    ]
    assert a.residual_conditions == b.residual_conditions


def test_random_certificates_verify():
    from hamdarboux.hamsys import load_system

    rng = random.Random(2024)
    for _ in range(6):
        c1 = rng.randint(1, 2)
        c2 = rng.randint(1, 2)
        system = load_system(
            f"m = 2\nfield = Q(i,sqrt2)\nmu = 1, 1\nV = {c1}*q1^4 + {c2}*q2^4\n"
        )
        report = search_darboux(system, 4)
        # each axis contributes p_k +- sqrt(2 c_k) i q_k^2, all proper
        proper = [c for c in report.certificates if c.proper]
        assert len(proper) == 4, (c1, c2, [str(c.F) for c in report.certificates])
        for cert in report.certificates:
            assert certificate_holds(system, cert)
