"""
Cusps of Gamma_1(N) and Gamma^1(N), and values of modular units at them.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import List, Sequence

from joblib import Parallel, delayed
from sympy import mod_inverse

from errors import PreconditionError
from modfunc import SiegelProduct, siegel_product_expand, siegel_product_valuation, transform_siegel_product
from qseries import CuspLimit

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class UnimodularMatrix:
    """[[a, b], [c, d]] with ad - bc = 1."""

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.a * self.d - self.b * self.c != 1:
            raise PreconditionError(f"determinant of {self.rows} is not 1")

    @classmethod
    def identity(cls) -> "UnimodularMatrix":
        return cls(1, 0, 0, 1)

    @property
    def rows(self):
        return [[self.a, self.b], [self.c, self.d]]

    def __matmul__(self, other: "UnimodularMatrix") -> "UnimodularMatrix":
        return UnimodularMatrix(self.a * other.a + self.b * other.c, self.a * other.b + self.b * other.d,
                                self.c * other.a + self.d * other.c, self.c * other.b + self.d * other.d)

    def inverse(self) -> "UnimodularMatrix":
        return UnimodularMatrix(self.d, -self.b, -self.c, self.a)

    def act(self, s: "Cusp") -> "Cusp":
        """Moebius action on P^1(Q)."""
        p, q = s.numerator, s.denominator
        return Cusp(self.a * p + self.b * q, self.c * p + self.d * q)

    def in_gamma1(self, n: int) -> bool:
        return (self.a - 1) % n == 0 and (self.d - 1) % n == 0 and self.c % n == 0

    def in_gamma_upper1(self, n: int) -> bool:
        return (self.a - 1) % n == 0 and (self.d - 1) % n == 0 and self.b % n == 0

    def __str__(self) -> str:
        return f"[[{self.a},{self.b}],[{self.c},{self.d}]]"


@dataclass(frozen=True)
class Cusp:
    """a/c in lowest terms with c >= 0; i-infinity is 1/0."""

    numerator: int
    denominator: int

    def __post_init__(self):
        p, q = self.numerator, self.denominator
        if p == 0 and q == 0:
            raise PreconditionError("0/0 is not a cusp")
        g = gcd(p, q)
        p, q = p // g, q // g
        if q < 0 or (q == 0 and p < 0):
            p, q = -p, -q
        object.__setattr__(self, "numerator", p)
        object.__setattr__(self, "denominator", q)

    @classmethod
    def infinity(cls) -> "Cusp":
        return cls(1, 0)

    @classmethod
    def from_fraction(cls, value) -> "Cusp":
        value = Fraction(value)
        return cls(value.numerator, value.denominator)

    @classmethod
    def parse(cls, text: str) -> "Cusp":
        cleaned = text.strip().lower()
        if cleaned in ("oo", "inf", "infinity", "i∞", "ioo"):
            return cls.infinity()
        try:
            return cls.from_fraction(Fraction(cleaned))
        except (ValueError, ZeroDivisionError) as exc:
            raise PreconditionError(f"malformed cusp {text!r}") from exc

    @property
    def is_infinity(self) -> bool:
        return self.denominator == 0

    def as_fraction(self) -> Fraction:
        if self.is_infinity:
            raise PreconditionError("i-infinity is not a rational number")
        return Fraction(self.numerator, self.denominator)

    def scaled(self, k) -> "Cusp":
        """The cusp k s for a positive rational k; i-infinity is fixed."""
        if self.is_infinity:
            return self
        return Cusp.from_fraction(self.as_fraction() * Fraction(k))

    def __str__(self) -> str:
        if self.is_infinity:
            return "oo"
        if self.denominator == 1:
            return str(self.numerator)
        return f"{self.numerator}/{self.denominator}"


def matrix_for_cusp(s: Cusp) -> UnimodularMatrix:
    """A matrix in SL2(Z) sending i-infinity to s, with first column (a, c) and 0 <= d < c."""
    if s.is_infinity:
        return UnimodularMatrix.identity()
    a, c = s.numerator, s.denominator
    d = 0 if c == 1 else int(mod_inverse(a, c))
    return UnimodularMatrix(a, (a * d - 1) // c, c, d)


def equivalent_under_gamma1(s: Cusp, t: Cusp, n: int) -> bool:
    """(a', c') = +-(a + jc, c) mod N for some j."""
    a, c = s.numerator, s.denominator
    a2, c2 = t.numerator, t.denominator
    step = gcd(c, n)
    return any((c2 - sign * c) % n == 0 and (a2 - sign * a) % step == 0 for sign in (1, -1))


def equivalent_under_gamma_upper1(s: Cusp, t: Cusp, n: int) -> bool:
    """Gamma^1(N) is conjugate to Gamma_1(N) by tau -> tau/N."""
    return equivalent_under_gamma1(s.scaled(Fraction(1, n)), t.scaled(Fraction(1, n)), n)


def cusp_list_gamma1(n: int) -> List[Cusp]:
    """
    Inequivalent cusps of Gamma_1(N), smallest denominator then numerator first,
    i-infinity last.
    """
    if n < 1:
        raise PreconditionError(f"level must be positive, got {n}")
    chosen = [Cusp.infinity()]
    for c in range(1, n + 1):
        for a in range(0 if c == 1 else 1, c if c > 1 else 1):
            if gcd(a, c) != 1:
                continue
            candidate = Cusp(a, c)
            if not any(equivalent_under_gamma1(candidate, seen, n) for seen in chosen):
                chosen.append(candidate)
    return chosen[1:] + chosen[:1]


def cusp_list_gamma_upper1(n: int) -> List[Cusp]:
    """Image of the Gamma_1(N) list under tau -> N tau."""
    return [s.scaled(n) for s in cusp_list_gamma1(n)]


def cusp_value(p: SiegelProduct, s: Cusp, prec=1) -> CuspLimit:
    """
    Behaviour of a Siegel product at the cusp s.

    Args:
        p: product whose exponent sum is divisible by 12
        s: the cusp
        prec: q-precision of the transformed expansion; must exceed 0

    Returns:
        CuspLimit of the transformed expansion
    """
    transformed = transform_siegel_product(p, matrix_for_cusp(s))
    logger.debug("cusp %s: transformed product %s has valuation %s", s, transformed,
                 siegel_product_valuation(transformed))
    return siegel_product_expand(transformed, prec).constant_term_or_order()


def cusp_values(p: SiegelProduct, cusps: Sequence[Cusp], prec=1, jobs: int = 1) -> List[CuspLimit]:
    """cusp_value over several cusps, optionally in parallel; the output follows the input order."""
    if jobs == 1:
        return [cusp_value(p, s, prec) for s in cusps]
    return Parallel(n_jobs=jobs)(delayed(cusp_value)(p, s, prec) for s in cusps)
