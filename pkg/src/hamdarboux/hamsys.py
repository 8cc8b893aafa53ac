"""Natural Hamiltonian systems H = (1/2) sum mu_i p_i^2 + V(q).

Provides the associated derivation (Lie derivative along the canonical
vector field), the time-reversal involution tau, and the weighted grading
with q-weight 2 and p-weight r = deg V.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .field import FieldElement, FieldSpec
from .parsing import SystemDefinition, parse_system_definition
from .poly import Direction, MultiPoly, VarSet


class GradingUnavailableError(ValueError):
    """Grading-based operations require deg V >= 3."""


@dataclass(frozen=True)
class GammaGrading:
    direction: Direction
    r: int


@dataclass(frozen=True)
class NaturalHamiltonian:
    varset: VarSet
    field: FieldSpec
    mu: tuple[FieldElement, ...]
    V: MultiPoly
    r: int
    H: MultiPoly
    grad_V: tuple[MultiPoly, ...]  # dV/dq_i, precomputed

    @property
    def m(self) -> int:
        return self.varset.m


def make_system(mu: Sequence, V: MultiPoly) -> NaturalHamiltonian:
    """Build the system from the mass coefficients and the potential."""
    varset = V.varset
    field = V.field
    m = varset.m
    if m < 2:
        raise ValueError(f"need m >= 2 degrees of freedom, got m = {m}")
    if len(mu) != m:
        raise ValueError(f"mu must have {m} entries, got {len(mu)}")
    if V.is_zero():
        raise ValueError("the potential V must be nonzero")
    if V.depends_on_p():
        raise ValueError("the potential V must depend on q-variables only")
    mu_elems = tuple(
        x if isinstance(x, FieldElement) else field.from_rational(Fraction(x)) for x in mu
    )
    r = V.total_degree()
    if r <= 2:
        warnings.warn(
            f"deg V = {r} <= 2: the system is constructible but grading-based "
            "operations will refuse to run",
            stacklevel=2,
        )
    H = V
    half = field.from_rational(Fraction(1, 2))
    for i in range(1, m + 1):
        p_i = MultiPoly.variable(varset, field, m + i)
        H = H + (p_i * p_i).scale(half * mu_elems[i - 1])
    grad = tuple(V.diff(i) for i in range(1, m + 1))
    return NaturalHamiltonian(
        varset=varset, field=field, mu=mu_elems, V=V, r=r, H=H, grad_V=grad
    )


def load_system(definition: SystemDefinition | str) -> NaturalHamiltonian:
    """Build a system from a parsed or raw system-definition file."""
    if isinstance(definition, str):
        definition = parse_system_definition(definition)
    return make_system(list(definition.mu), definition.potential)


def lie_derivative(sys: NaturalHamiltonian, F: MultiPoly) -> MultiPoly:
    """sum_i mu_i p_i dF/dq_i - sum_i (dV/dq_i) dF/dp_i, exactly."""
    if F.varset != sys.varset or F.field != sys.field:
        raise ValueError("polynomial does not live in the system's ring")
    m = sys.m
    out = MultiPoly.zero(sys.varset, sys.field)
    for i in range(1, m + 1):
        dq = F.diff(i)
        if not dq.is_zero():
            p_i = MultiPoly.variable(sys.varset, sys.field, m + i)
            out = out + p_i.scale(sys.mu[i - 1]) * dq
        dp = F.diff(m + i)
        if not dp.is_zero():
            out = out - sys.grad_V[i - 1] * dp
    return out


def tau(F: MultiPoly) -> MultiPoly:
    """Time reversal: fixes q_i, negates p_i; an involution of the ring."""
    m = F.varset.m
    terms = {}
    for exps, coef in F.terms.items():
        if sum(exps[m:]) % 2:
            terms[exps] = -coef
        else:
            terms[exps] = coef
    return MultiPoly(F.varset, F.field, terms)


def gamma_direction(sys: NaturalHamiltonian) -> GammaGrading:
    """Weights (2,...,2, r,...,r) with r = deg V; requires r >= 3."""
    if sys.r <= 2:
        raise GradingUnavailableError(
            f"deg V = {sys.r} <= 2: the weighted grading is unavailable"
        )
    m = sys.m
    return GammaGrading(direction=Direction((2,) * m + (sys.r,) * m), r=sys.r)


def top_hamiltonian(sys: NaturalHamiltonian) -> NaturalHamiltonian:
    """Replace V by its top total-degree component (same mu)."""
    grading = gamma_direction(sys)  # enforces r >= 3
    del grading
    top_terms = {
        exps: coef
        for exps, coef in sys.V.terms.items()
        if sum(exps) == sys.r
    }
    v_top = MultiPoly(sys.varset, sys.field, top_terms)
    return make_system(list(sys.mu), v_top)


def is_homogeneous_potential(sys: NaturalHamiltonian) -> bool:
    return len({sum(e) for e in sys.V.terms}) <= 1
