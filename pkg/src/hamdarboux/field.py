"""Exact scalar arithmetic: rationals and the quartic extension Q(i, sqrt(d)).

Elements are stored on the fixed basis {1, i, sqrt(d), i*sqrt(d)} with
Fraction components, so every operation is exact and canonical forms are
unique.  For the plain-rational field the i/sqrt components are pinned to 0.
"""

from __future__ import annotations

from enum import Enum
from fractions import Fraction
from typing import Union

RationalLike = Union[int, Fraction]


class FieldMismatchError(ValueError):
    """Raised when operands belong to different coefficient fields."""


class FieldKind(Enum):
    RATIONALS = "Q"
    QUAD_GAUSS = "Q(i,sqrt d)"


def _is_square_free(n: int) -> bool:
    if n < 1:
        return False
    k = 2
    while k * k <= n:
        if n % (k * k) == 0:
            return False
        k += 1
    return True


class FieldSpec:
    """Identifies the coefficient field: Q, or Q(i, sqrt(d)) for square-free d >= 2."""

    __slots__ = ("kind", "d")

    def __init__(self, kind: FieldKind, d: int | None = None):
        if kind is FieldKind.QUAD_GAUSS:
            if d is None or d < 2 or not _is_square_free(d):
                raise ValueError(f"d must be a square-free integer >= 2, got {d!r}")
        else:
            if d is not None:
                raise ValueError("d is only meaningful for Q(i,sqrt d)")
        self.kind = kind
        self.d = d

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, FieldSpec)
            and self.kind is other.kind
            and self.d == other.d
        )

    def __hash__(self) -> int:
        return hash((self.kind, self.d))

    def __repr__(self) -> str:
        if self.kind is FieldKind.RATIONALS:
            return "FieldSpec(Q)"
        return f"FieldSpec(Q(i,sqrt{self.d}))"

    # -- constructors for elements ------------------------------------

    def element(
        self,
        a: RationalLike = 0,
        b: RationalLike = 0,
        c: RationalLike = 0,
        e: RationalLike = 0,
    ) -> "FieldElement":
        return FieldElement(self, Fraction(a), Fraction(b), Fraction(c), Fraction(e))

    def zero(self) -> "FieldElement":
        return self.element(0)

    def one(self) -> "FieldElement":
        return self.element(1)

    def from_rational(self, a: RationalLike) -> "FieldElement":
        return self.element(Fraction(a))

    def i(self) -> "FieldElement":
        return self.element(0, 1)

    def sqrt_d(self) -> "FieldElement":
        return self.element(0, 0, 1)


RATIONALS = FieldSpec(FieldKind.RATIONALS)


def quad_gauss(d: int) -> FieldSpec:
    return FieldSpec(FieldKind.QUAD_GAUSS, d)


class FieldElement:
    """a + b*i + c*sqrt(d) + e*i*sqrt(d), all components exact rationals."""

    __slots__ = ("spec", "a", "b", "c", "e")

    def __init__(self, spec: FieldSpec, a: Fraction, b: Fraction, c: Fraction, e: Fraction):
        if spec.kind is FieldKind.RATIONALS and (b or c or e):
            raise FieldMismatchError("non-rational components in a Q element")
        self.spec = spec
        self.a = a
        self.b = b
        self.c = c
        self.e = e

    # -- helpers -------------------------------------------------------

    def _coerce(self, other) -> "FieldElement":
        if isinstance(other, FieldElement):
            if other.spec != self.spec:
                raise FieldMismatchError(f"mixed fields: {self.spec!r} vs {other.spec!r}")
            return other
        if isinstance(other, (int, Fraction)):
            return self.spec.from_rational(other)
        return NotImplemented  # type: ignore[return-value]

    def is_zero(self) -> bool:
        return not (self.a or self.b or self.c or self.e)

    def is_rational(self) -> bool:
        return not (self.b or self.c or self.e)

    def is_real(self) -> bool:
        return not (self.b or self.e)

    def to_float(self) -> float:
        if not self.is_real():
            raise ValueError(f"{self} has a nonzero imaginary part")
        x = float(self.a)
        if self.c:
            x += float(self.c) * float(self.spec.d) ** 0.5
        return x

    def components(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        return (self.a, self.b, self.c, self.e)

    def sort_key(self):
        return (self.a, self.b, self.c, self.e)

    # -- arithmetic ----------------------------------------------------

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return FieldElement(self.spec, self.a + o.a, self.b + o.b, self.c + o.c, self.e + o.e)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return FieldElement(self.spec, self.a - o.a, self.b - o.b, self.c - o.c, self.e - o.e)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return FieldElement(self.spec, -self.a, -self.b, -self.c, -self.e)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        a1, b1, c1, e1 = self.a, self.b, self.c, self.e
        a2, b2, c2, e2 = o.a, o.b, o.c, o.e
        if not (b1 or c1 or e1) and not (b2 or c2 or e2):
            return FieldElement(self.spec, a1 * a2, b1, c1, e1)
        d = Fraction(self.spec.d) if self.spec.d is not None else Fraction(0)
        # i^2 = -1, sqrt(d)^2 = d, (i sqrt(d))^2 = -d
        a = a1 * a2 - b1 * b2 + d * (c1 * c2 - e1 * e2)
        b = a1 * b2 + b1 * a2 + d * (c1 * e2 + e1 * c2)
        c = a1 * c2 + c1 * a2 - (b1 * e2 + e1 * b2)
        e = a1 * e2 + e1 * a2 + b1 * c2 + c1 * b2
        return FieldElement(self.spec, a, b, c, e)

    __rmul__ = __mul__

    def conj_i(self) -> "FieldElement":
        return FieldElement(self.spec, self.a, -self.b, self.c, -self.e)

    def conj_sqrt(self) -> "FieldElement":
        return FieldElement(self.spec, self.a, self.b, -self.c, -self.e)

    def inverse(self) -> "FieldElement":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero field element")
        if self.is_rational():
            return self.spec.from_rational(1 / self.a)
        # conjugate over i, then over sqrt(d): the product of all four
        # conjugates is a nonzero rational norm.
        y = self.conj_i()
        z = self * y
        w = z.conj_sqrt()
        n = z * w
        if not n.is_rational() or n.is_zero():
            raise ArithmeticError("norm computation failed")  # pragma: no cover
        return (y * w) * Fraction(1, 1) * self.spec.from_rational(1 / n.a)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = self.spec.from_rational(other)
        if not isinstance(other, FieldElement):
            return NotImplemented
        return (
            self.spec == other.spec
            and self.a == other.a
            and self.b == other.b
            and self.c == other.c
            and self.e == other.e
        )

    def __hash__(self) -> int:
        return hash((self.spec, self.a, self.b, self.c, self.e))

    def __repr__(self) -> str:
        return f"FieldElement({self})"

    def __str__(self) -> str:
        from .parsing import format_field_element

        return format_field_element(self)
