"""Exact Darboux polynomials and polynomial first integrals of natural
polynomial Hamiltonian systems H = 1/2 sum mu_i p_i^2 + V(q)."""

from .corpus import CORPUS, CorpusEntry, run_corpus
from .darboux import (
    CofactorMismatchError,
    DarbouxCertificate,
    InternalInvariantError,
    NonCoprimeError,
    NotProperError,
    RationalIntegral,
    ReversalVacuousError,
    certificate_holds,
    cofactor_of,
    rational_integral_from_pair,
    reversal_integral,
    verify_first_integral,
)
from .field import (
    RATIONALS,
    FieldElement,
    FieldKind,
    FieldMismatchError,
    FieldSpec,
    quad_gauss,
)
from .hamsys import (
    GammaGrading,
    GradingUnavailableError,
    NaturalHamiltonian,
    gamma_direction,
    is_homogeneous_potential,
    lie_derivative,
    load_system,
    make_system,
    tau,
    top_hamiltonian,
)
from .numcheck import (
    NotRealEvaluableError,
    Trajectory,
    drift,
    evaluate_float,
    integrate_rk4,
)
from .parsing import (
    ParseContext,
    ParseError,
    SystemDefinition,
    format_field_spec,
    format_poly,
    parse_field_spec,
    parse_poly,
    parse_system_definition,
)
from .poly import (
    Direction,
    MultiPoly,
    TooDenseError,
    VarSet,
    VarSetMismatchError,
    monomial_key,
    multivariate_gcd,
)
from .search import (
    BranchCapExceededError,
    SearchReport,
    roots_in_field,
    search_darboux,
    sqrt_in_field,
)
from .structure import (
    FactorWitness,
    TheoremReport,
    Verdict,
    check_theorem1,
    check_theorem2_pipeline,
    factor_ansatz_search,
    is_irreducible_natural_H,
    jacobian_independent,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "1.0.0"
