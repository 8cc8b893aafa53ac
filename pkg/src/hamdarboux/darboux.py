"""Darboux-polynomial verification, cofactor extraction, and the
time-reversal first-integral construction."""

from __future__ import annotations

from dataclasses import dataclass

from .hamsys import NaturalHamiltonian, gamma_direction, lie_derivative, tau
from .poly import MultiPoly, multivariate_gcd


class InternalInvariantError(RuntimeError):
    """A structural invariant that should be impossible to violate failed."""


class NotProperError(ValueError):
    pass


class ReversalVacuousError(ValueError):
    """deg V odd: every Darboux polynomial is already a first integral."""


class CofactorMismatchError(ValueError):
    pass


class NonCoprimeError(ValueError):
    def __init__(self, common_factor: MultiPoly):
        super().__init__(f"inputs share the common factor {common_factor}")
        self.common_factor = common_factor


@dataclass(frozen=True)
class DarbouxCertificate:
    """A verified pair (F, Lambda) with L_H F = Lambda * F, F monic."""

    F: MultiPoly
    Lambda: MultiPoly

    @property
    def proper(self) -> bool:
        return not self.Lambda.is_zero()


@dataclass(frozen=True)
class RationalIntegral:
    """A pair of coprime Darboux polynomials sharing one cofactor: F/G is
    a rational first integral."""

    numerator: DarbouxCertificate
    denominator: DarbouxCertificate


def _validate_cofactor(sys: NaturalHamiltonian, Lambda: MultiPoly) -> None:
    if sys.r < 2:
        return  # the q-only/degree-bound structure is only guaranteed for deg V >= 2
    if Lambda.depends_on_p():
        raise InternalInvariantError(
            f"cofactor {Lambda} depends on momenta (deg V = {sys.r})"
        )
    if sys.r >= 3:
        grading = gamma_direction(sys)
        gdeg = Lambda.gamma_degree(grading.direction)
        if gdeg is not None and gdeg > sys.r - 2:
            raise InternalInvariantError(
                f"cofactor {Lambda} has weighted degree {gdeg} > r - 2 = {sys.r - 2}"
            )


def cofactor_of(sys: NaturalHamiltonian, F: MultiPoly) -> DarbouxCertificate | None:
    """Certificate for F, or None when F is not a Darboux polynomial."""
    if F.is_zero():
        raise ValueError("the zero polynomial is not a Darboux polynomial")
    image = lie_derivative(sys, F)
    if image.is_zero():
        return DarbouxCertificate(F=F.monic(), Lambda=MultiPoly.zero(sys.varset, sys.field))
    quotient = image.divide_exact(F)
    if quotient is None:
        return None
    _validate_cofactor(sys, quotient)
    return DarbouxCertificate(F=F.monic(), Lambda=quotient)


def certificate_holds(sys: NaturalHamiltonian, cert: DarbouxCertificate) -> bool:
    """Recheck L_H F - Lambda*F = 0 independently of how the cert was made."""
    return (lie_derivative(sys, cert.F) - cert.Lambda * cert.F).is_zero()


def verify_first_integral(sys: NaturalHamiltonian, F: MultiPoly) -> bool:
    """True iff L_H F = 0 exactly."""
    if F.is_zero():
        raise ValueError("the zero polynomial is not admitted as a first integral")
    return lie_derivative(sys, F).is_zero()


def reversal_integral(sys: NaturalHamiltonian, cert: DarbouxCertificate) -> DarbouxCertificate:
    """From a Darboux polynomial F with cofactor Lambda, build the first
    integral tau(F)*F; checks the cofactor sign flip of tau(F) en route."""
    if sys.r % 2:
        raise ReversalVacuousError(
            "deg V is odd: every Darboux polynomial already has cofactor 0, "
            "so the reversal construction is vacuous"
        )
    if not certificate_holds(sys, cert):
        raise ValueError("invalid certificate for this system")
    reversed_cert = cofactor_of(sys, tau(cert.F))
    if reversed_cert is None or not (reversed_cert.Lambda + cert.Lambda).is_zero():
        raise InternalInvariantError(
            "tau(F) does not carry the negated cofactor"
        )
    G = tau(cert.F) * cert.F
    integral = DarbouxCertificate(F=G.monic(), Lambda=MultiPoly.zero(sys.varset, sys.field))
    if not certificate_holds(sys, integral):
        raise InternalInvariantError("tau(F)*F failed the first-integral check")
    return integral


def rational_integral_from_pair(
    sys: NaturalHamiltonian,
    cert_num: DarbouxCertificate,
    cert_den: DarbouxCertificate,
) -> RationalIntegral:
    """Tag two coprime Darboux polynomials with equal cofactors as F/G."""
    for cert in (cert_num, cert_den):
        if not certificate_holds(sys, cert):
            raise ValueError(f"invalid certificate for {cert.F}")
    if not (cert_num.Lambda - cert_den.Lambda).is_zero():
        raise CofactorMismatchError(
            f"cofactors differ: {cert_num.Lambda} vs {cert_den.Lambda}"
        )
    g = multivariate_gcd(cert_num.F, cert_den.F)
    if not g.is_constant():
        raise NonCoprimeError(g)
    return RationalIntegral(numerator=cert_num, denominator=cert_den)
