"""
Modular functions as exact q-series: Siegel functions and their products,
eta, Delta, Eisenstein series, the Weierstrass wp-function, Fricke functions
and Weierstrass units.

Functions with a transcendental (2 pi)-power carry it in the series' two-pi
weight, so every coefficient below is an element of a cyclotomic field.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Dict, Iterable, List, Optional, Tuple

from sympy import divisor_sigma

from errors import ModularUnitsError, PreconditionError, PrecisionError
from exact_arith import CyclotomicNumber
from qseries import PuiseuxSeries

logger = logging.getLogger(__name__)

FRICKE_CONSTANT = 2 ** 7 * 3 ** 5


def _lcm(a: int, b: int) -> int:
    return a // gcd(a, b) * b


@dataclass(frozen=True, order=True)
class RationalVector:
    """A pair (r1, r2) in Q^2; used as the index of Siegel and Fricke functions."""

    r1: Fraction
    r2: Fraction

    def __post_init__(self):
        object.__setattr__(self, "r1", Fraction(self.r1))
        object.__setattr__(self, "r2", Fraction(self.r2))

    @classmethod
    def parse(cls, text: str) -> "RationalVector":
        """Parse "a/b,c/d" (brackets and spaces allowed)."""
        cleaned = text.strip().strip("[]()").replace(" ", "")
        parts = cleaned.split(",")
        if len(parts) != 2:
            raise PreconditionError(f"expected two comma separated rationals, got {text!r}")
        try:
            return cls(Fraction(parts[0]), Fraction(parts[1]))
        except (ValueError, ZeroDivisionError) as exc:
            raise PreconditionError(f"malformed rational vector {text!r}") from exc

    @property
    def denominator(self) -> int:
        return _lcm(self.r1.denominator, self.r2.denominator)

    def is_integral(self) -> bool:
        return self.denominator == 1

    def __add__(self, other: "RationalVector") -> "RationalVector":
        return RationalVector(self.r1 + other.r1, self.r2 + other.r2)

    def __sub__(self, other: "RationalVector") -> "RationalVector":
        return RationalVector(self.r1 - other.r1, self.r2 - other.r2)

    def __neg__(self) -> "RationalVector":
        return RationalVector(-self.r1, -self.r2)

    def scale(self, k) -> "RationalVector":
        return RationalVector(self.r1 * k, self.r2 * k)

    def reduced(self) -> "RationalVector":
        """Representative modulo Z^2 with both coordinates in [0, 1)."""
        return RationalVector(self.r1 % 1, self.r2 % 1)

    def congruent(self, other: "RationalVector", up_to_sign: bool = True) -> bool:
        """r = s mod Z^2, or r = -s mod Z^2 when up_to_sign."""
        if (self - other).is_integral():
            return True
        return up_to_sign and (self + other).is_integral()

    def transpose_action(self, a: int, b: int, c: int, d: int) -> "RationalVector":
        """t(gamma) r for gamma = [[a, b], [c, d]]."""
        return RationalVector(a * self.r1 + c * self.r2, b * self.r1 + d * self.r2)

    def __str__(self) -> str:
        return f"[{self.r1},{self.r2}]"


@dataclass(frozen=True)
class SiegelProduct:
    """
    A finite product of Siegel functions with integer exponents.

    Factors are merged by vector, zero exponents dropped; every vector lies in (1/N)Z^2.
    """

    factors: Tuple[Tuple[RationalVector, int], ...]
    level: int

    @classmethod
    def from_factors(cls, factors: Iterable[Tuple[RationalVector, int]],
                     level: Optional[int] = None) -> "SiegelProduct":
        merged: Dict[RationalVector, int] = {}
        for r, m in factors:
            if not isinstance(r, RationalVector):
                r = RationalVector(*r)
            merged[r] = merged.get(r, 0) + int(m)
        merged = {r: m for r, m in merged.items() if m}
        natural = 1
        for r in merged:
            natural = _lcm(natural, r.denominator)
        if level is None:
            level = natural
        elif level < 1 or level % natural:
            raise PreconditionError(f"vectors of denominator {natural} are not of level {level}")
        for r in merged:
            if r.is_integral():
                raise PreconditionError(f"Siegel function at integral vector {r} is not defined")
        return cls(tuple(sorted(merged.items())), level)

    @property
    def exponent_sum(self) -> int:
        return sum(m for _, m in self.factors)

    def __mul__(self, other: "SiegelProduct") -> "SiegelProduct":
        return SiegelProduct.from_factors(list(self.factors) + list(other.factors),
                                          _lcm(self.level, other.level))

    def inverse(self) -> "SiegelProduct":
        return SiegelProduct.from_factors([(r, -m) for r, m in self.factors], self.level)

    def at_level(self, level: int) -> "SiegelProduct":
        return SiegelProduct.from_factors(self.factors, level)

    def __str__(self) -> str:
        return " ".join(f"g{r}" + (f"^{m}" if m != 1 else "") for r, m in self.factors) or "1"


@dataclass(frozen=True)
class CriterionReport:
    """Residues of the four congruence conditions for a Siegel product to lie in F_N."""

    level: int
    first_moment: int
    second_moment: int
    mixed_moment: int
    weighted_count: int
    moment_modulus: int
    holds: bool = field(default=False)

    def as_dict(self) -> Dict[str, int]:
        return {
            "level": self.level,
            "sum m (N r1)^2 mod gcd(2,N)N": self.first_moment,
            "sum m (N r2)^2 mod gcd(2,N)N": self.second_moment,
            "sum m (N r1)(N r2) mod N": self.mixed_moment,
            "sum m gcd(12,N) mod 12": self.weighted_count,
        }


def bernoulli2(x) -> Fraction:
    """Second Bernoulli polynomial x^2 - x + 1/6."""
    x = Fraction(x)
    return x * x - x + Fraction(1, 6)


def _siegel_factor_layout(r: RationalVector) -> Tuple[Fraction, List[Tuple[Fraction, Fraction]], int, int]:
    """
    Leading exponent, exceptional factors and the first regular indices of g_r.

    The product is over (1 - q^{n+r1} e^{2 pi i r2}), n >= 0, and
    (1 - q^{n-r1} e^{-2 pi i r2}), n >= 1.  Factors with exponent <= 0 are
    returned as (exponent, root exponent) pairs; they are exact Laurent factors.
    """
    if r.is_integral():
        raise PreconditionError(f"Siegel function at integral vector {r} is not defined")
    exceptional: List[Tuple[Fraction, Fraction]] = []
    first_a = 0
    while first_a + r.r1 <= 0:
        exceptional.append((first_a + r.r1, r.r2))
        first_a += 1
    first_b = 1
    while first_b - r.r1 <= 0:
        exceptional.append((first_b - r.r1, -r.r2))
        first_b += 1
    return bernoulli2(r.r1) / 2, exceptional, first_a, first_b


def siegel_valuation(r: RationalVector) -> Fraction:
    """Exact order of g_r at q = 0."""
    leading, exceptional, _, _ = _siegel_factor_layout(r)
    return leading + sum((e for e, _ in exceptional if e < 0), Fraction(0))


def siegel_root_exponent(r: RationalVector) -> Fraction:
    """t with -e^{pi i r2 (r1 - 1)} = e^{2 pi i t}."""
    return (r.r2 * (r.r1 - 1) / 2 + Fraction(1, 2)) % 1


def _binomial(exponent: Fraction, root: Fraction) -> PuiseuxSeries:
    """1 - e^{2 pi i root} q^exponent, exact."""
    zeta = CyclotomicNumber.root_of_unity(root)
    if exponent == 0:
        return PuiseuxSeries.constant(1 - zeta)
    return PuiseuxSeries.from_exponents({Fraction(0): 1, exponent: -zeta})


@lru_cache(maxsize=2048)
def _siegel_unit_part(r: RationalVector, relative: Fraction) -> PuiseuxSeries:
    """g_r without its root-of-unity constant, to the given relative precision."""
    leading, exceptional, first_a, first_b = _siegel_factor_layout(r)
    regular = PuiseuxSeries.one().truncate(relative)
    n = first_a
    while n + r.r1 < relative:
        regular = regular * _binomial(n + r.r1, r.r2)
        n += 1
    n = first_b
    while n - r.r1 < relative:
        regular = regular * _binomial(n - r.r1, -r.r2)
        n += 1
    series = PuiseuxSeries.monomial(1, leading)
    for exponent, root in exceptional:
        series = series * _binomial(exponent, root)
    logger.debug("expanded g%s to relative precision %s", r, relative)
    return series * regular


def siegel(r: RationalVector, prec) -> PuiseuxSeries:
    """
    q-expansion of the Siegel function g_r, known modulo q^prec.

    Args:
        r: a non-integral rational vector, used as given (not reduced)
        prec: absolute q-exponent precision

    Returns:
        Weight-0 series with coefficients in Q(zeta_{2D^2}), D the denominator of r
    """
    prec = Fraction(prec)
    if prec <= siegel_valuation(r):
        return PuiseuxSeries.zero(prec)
    relative = prec - siegel_valuation(r)
    constant = CyclotomicNumber.root_of_unity(siegel_root_exponent(r))
    return _siegel_unit_part(r, relative).scale(constant).truncate(prec)


def siegel_shift_constant(r: RationalVector, shift: RationalVector) -> CyclotomicNumber:
    """The root of unity e with g_{r+b} = e g_r for an integral vector b."""
    if not shift.is_integral():
        raise PreconditionError(f"shift {shift} is not integral")
    b1, b2 = int(shift.r1), int(shift.r2)
    t = Fraction(b1 * b2 + b1 + b2, 2) - (b1 * r.r2 - b2 * r.r1) / 2
    return CyclotomicNumber.root_of_unity(t)


def siegel_product_valuation(p: SiegelProduct) -> Fraction:
    return sum((m * siegel_valuation(r) for r, m in p.factors), Fraction(0))


def siegel_product_expand(p: SiegelProduct, prec) -> PuiseuxSeries:
    """q-expansion of prod g_r^{m(r)}, known modulo q^prec."""
    prec = Fraction(prec)
    valuation = siegel_product_valuation(p)
    if prec <= valuation:
        return PuiseuxSeries.zero(prec)
    relative = prec - valuation
    root = Fraction(0)
    product = PuiseuxSeries.one()
    for r, m in p.factors:
        root += m * siegel_root_exponent(r)
        product = product * (_siegel_unit_part(r, relative) ** m)
    return product.scale(CyclotomicNumber.root_of_unity(root)).truncate(prec)


def modularity_criterion(p: SiegelProduct) -> Tuple[bool, CriterionReport]:
    """
    Decide whether a Siegel product of level N lies in F_N.

    Conditions: sum m (N r1)^2 and sum m (N r2)^2 vanish mod gcd(2,N) N,
    sum m (N r1)(N r2) vanishes mod N and sum m gcd(12, N) vanishes mod 12.
    """
    n = p.level
    modulus = gcd(2, n) * n
    first = second = mixed = 0
    for r, m in p.factors:
        a, b = r.r1 * n, r.r2 * n
        if a.denominator != 1 or b.denominator != 1:
            raise PreconditionError(f"vector {r} is not in (1/{n})Z^2")
        a, b = int(a), int(b)
        first += m * a * a
        second += m * b * b
        mixed += m * a * b
    residues = (first % modulus, second % modulus, mixed % n, p.exponent_sum * gcd(12, n) % 12)
    holds = not any(residues)
    return holds, CriterionReport(n, *residues, modulus, holds)


def transform_siegel_product(p: SiegelProduct, gamma) -> SiegelProduct:
    """
    The product composed with gamma in SL2(Z): every vector r becomes t(gamma) r, unreduced.

    Raises:
        PreconditionError: if the exponent sum is not divisible by 12
    """
    if p.exponent_sum % 12:
        raise PreconditionError(
            f"exponent sum {p.exponent_sum} is not divisible by 12; the transform is only defined up to a root of unity")
    a, b, c, d = gamma.a, gamma.b, gamma.c, gamma.d
    if a * d - b * c != 1:
        raise PreconditionError(f"matrix {gamma} is not in SL2(Z)")
    return SiegelProduct.from_factors(
        [(r.transpose_action(a, b, c, d), m) for r, m in p.factors], p.level)


# -- the classical zoo ---------------------------------------------------------

def _q_units(prec) -> int:
    return max(math.ceil(Fraction(prec)), 0)


@lru_cache(maxsize=64)
def euler_product(prec: int) -> PuiseuxSeries:
    """prod_{n>=1} (1 - q^n) modulo q^prec via the pentagonal number theorem."""
    terms: Dict[int, int] = {}
    k = 0
    while True:
        emitted = False
        for j in ((k,) if k == 0 else (k, -k)):
            exponent = j * (3 * j - 1) // 2
            if exponent < prec:
                terms[exponent] = -1 if j % 2 else 1
                emitted = True
        if not emitted:
            break
        k += 1
    return PuiseuxSeries(terms, 1, prec)


def eta(prec) -> PuiseuxSeries:
    """Dedekind eta = sqrt(2 pi) zeta_8 q^{1/24} prod (1 - q^n); two-pi weight 1."""
    prec = Fraction(prec)
    base = euler_product(_q_units(prec))
    series = base * PuiseuxSeries.monomial(CyclotomicNumber.zeta(8), Fraction(1, 24), weight=1)
    return series.truncate(prec)


@lru_cache(maxsize=64)
def _delta(prec: int) -> PuiseuxSeries:
    body = euler_product(max(prec - 1, 0)) ** 24
    return body * PuiseuxSeries.monomial(1, Fraction(1), weight=24)


def delta(prec) -> PuiseuxSeries:
    """Delta = (2 pi)^12 q prod (1 - q^n)^24; two-pi weight 24."""
    return _delta(_q_units(prec)).truncate(Fraction(prec))


@lru_cache(maxsize=64)
def _eisenstein(k: int, prec: int) -> PuiseuxSeries:
    factor = {4: 240, 6: -504}[k]
    terms = {0: 1}
    for n in range(1, prec):
        terms[n] = factor * int(divisor_sigma(n, k - 1))
    return PuiseuxSeries(terms, 1, prec)


def e4(prec) -> PuiseuxSeries:
    return _eisenstein(4, _q_units(prec))


def e6(prec) -> PuiseuxSeries:
    return _eisenstein(6, _q_units(prec))


def g2(prec) -> PuiseuxSeries:
    """g2 = (2 pi)^4 E4 / 12; two-pi weight 8."""
    return e4(prec).scale(Fraction(1, 12)).with_weight(8)


def g3(prec) -> PuiseuxSeries:
    """g3 = (2 pi)^6 E6 / 216; two-pi weight 12."""
    return e6(prec).scale(Fraction(1, 216)).with_weight(12)


def j_invariant(prec) -> PuiseuxSeries:
    """j = 1728 g2^3 / Delta, known modulo q^prec."""
    n = _q_units(prec)
    result = (g2(n + 1) ** 3) * delta(n + 2).inverse()
    return result.scale(1728).truncate(Fraction(prec))


def wp_expansion(r: RationalVector, prec) -> PuiseuxSeries:
    """
    wp(r1 tau + r2; [tau, 1]) as (2 pi i)^2 times a q-series; two-pi weight 4.

    Raises:
        PreconditionError: if r is integral (the pole of wp)
    """
    if r.is_integral():
        raise PreconditionError(f"wp has a pole at the lattice point {r}")
    prec = Fraction(prec)
    r = r.reduced()
    terms: Dict[Fraction, CyclotomicNumber] = {}

    def add(exponent: Fraction, value: CyclotomicNumber) -> None:
        terms[exponent] = terms[exponent] + value if exponent in terms else value

    add(Fraction(0), CyclotomicNumber.rational(Fraction(1, 12)))
    if r.r1 == 0:
        zeta = CyclotomicNumber.root_of_unity(r.r2)
        add(Fraction(0), zeta / ((1 - zeta) * (1 - zeta)))
        n = 1
        while n < prec:
            k = 1
            while n * k < prec:
                pair = CyclotomicNumber.root_of_unity(k * r.r2) + CyclotomicNumber.root_of_unity(-k * r.r2)
                add(Fraction(n * k), pair * k)
                k += 1
            n += 1
    else:
        for base, sign in ((r.r1, 1), (1 - r.r1, -1)):
            exponent = base
            while exponent < prec:
                k = 1
                while k * exponent < prec:
                    add(k * exponent, CyclotomicNumber.root_of_unity(sign * k * r.r2) * k)
                    k += 1
                exponent += 1
    n = 1
    while n < prec:
        add(Fraction(n), CyclotomicNumber.rational(-2 * int(divisor_sigma(n, 1))))
        n += 1
    x_series = PuiseuxSeries.from_exponents(terms, prec)
    return PuiseuxSeries.from_exponents({e: -c for e, c in x_series.items()}, x_series.precision, weight=4)


@lru_cache(maxsize=64)
def fricke_prefactor(prec: int) -> PuiseuxSeries:
    """-2^7 3^5 g2 g3 / Delta modulo q^prec; two-pi weight -4."""
    body = g2(prec + 1) * g3(prec + 1) * delta(prec + 2).inverse()
    return body.scale(-FRICKE_CONSTANT).truncate(prec)


def fricke(r: RationalVector, prec) -> PuiseuxSeries:
    """
    Fricke function f_r = -2^7 3^5 g2 g3 wp(r) / Delta, known modulo q^prec.

    It depends only on +-r modulo Z^2 and starts q^{-1} + ...
    """
    n = _q_units(prec)
    result = fricke_prefactor(n) * wp_expansion(r, n + 1)
    if result.weight != 0:
        raise ModularUnitsError(f"Fricke function came out with two-pi weight {result.weight}")
    return result.truncate(Fraction(prec))


def _fricke_siegel_factor(r: RationalVector, s: RationalVector) -> SiegelProduct:
    return SiegelProduct.from_factors([(r + s, 1), (r - s, 1), (r, -2), (s, -2)])


def verify_fricke_siegel(r: RationalVector, s: RationalVector, prec) -> bool:
    """
    Check f_r - f_s = 2^7 3^5 g2 g3 eta^4 / Delta * g_{r+s} g_{r-s} / (g_r^2 g_s^2) modulo q^prec.

    Raises:
        PreconditionError: if r or s is integral or r = +-s mod Z^2
        PrecisionError: if the working precision falls short of prec
    """
    if r.is_integral() or s.is_integral():
        raise PreconditionError("both vectors must be non-integral")
    if r.congruent(s):
        raise PreconditionError(f"{r} and {s} agree up to sign modulo Z^2")
    prec = Fraction(prec)
    lhs = fricke(r, prec) - fricke(s, prec)
    quotient = _fricke_siegel_factor(r, s)
    outer_valuation = Fraction(-5, 6)
    relative = prec - outer_valuation - siegel_product_valuation(quotient) + 1
    n = _q_units(relative) + 1
    outer = g2(n) * g3(n) * (eta(n) ** 4) * delta(n + 1).inverse()
    rhs = outer.scale(FRICKE_CONSTANT) * siegel_product_expand(
        quotient, siegel_product_valuation(quotient) + relative)
    difference = lhs - rhs
    if difference.precision is not None and difference.precision < prec:
        raise PrecisionError(f"identity only checked to O(q^{difference.precision})")
    logger.info("Fricke-Siegel identity for %s, %s: difference %s", r, s,
                "vanishes" if difference.is_zero() else "is nonzero")
    return difference.is_zero()


def fricke_difference_valuation(r: RationalVector, s: RationalVector) -> Fraction:
    """Exact order at q = 0 of f_r - f_s, read off its Siegel product form."""
    if r.congruent(s):
        raise PreconditionError(f"f_{r} - f_{s} vanishes identically")
    return Fraction(-5, 6) + siegel_product_valuation(_fricke_siegel_factor(r, s))


def fricke_quotient(r: RationalVector, s: RationalVector, t: RationalVector, prec) -> PuiseuxSeries:
    """(f_r - f_s) / (f_t - f_s) modulo q^prec; a zero numerator gives the zero series."""
    prec = Fraction(prec)
    if r.congruent(s):
        return PuiseuxSeries.zero(prec)
    top, bottom = fricke_difference_valuation(r, s), fricke_difference_valuation(t, s)
    relative = prec - (top - bottom)
    working = _q_units(max(top, bottom) + relative) + 1
    base = fricke(s, working)
    quotient = (fricke(r, working) - base) / (fricke(t, working) - base)
    return quotient.truncate(prec)


def _weierstrass_vectors(m: int, n: int) -> Tuple[RationalVector, RationalVector, RationalVector]:
    if m < 4 or n % m or n == m:
        raise PreconditionError(f"Weierstrass unit needs m >= 4 and m a proper divisor of N, got m={m}, N={n}")
    return RationalVector(Fraction(1, n), 0), RationalVector(Fraction(1, m), 0), RationalVector(Fraction(2, m), 0)


def weierstrass_unit_siegel_form(m: int, n: int, prec) -> PuiseuxSeries:
    """f^1_{m,N} written as a Siegel product and expanded."""
    r, s, t = _weierstrass_vectors(m, n)
    product = _fricke_siegel_factor(r, s) * _fricke_siegel_factor(t, s).inverse()
    return siegel_product_expand(product, prec)


def weierstrass_unit(m: int, n: int, prec, cross_check: bool = True) -> PuiseuxSeries:
    """
    f^1_{m,N} = (f_{[1/N,0]} - f_{[1/m,0]}) / (f_{[2/m,0]} - f_{[1/m,0]}), modulo q^prec.

    Raises:
        ModularUnitsError: if a coefficient is irrational or the Siegel form disagrees
    """
    r, s, t = _weierstrass_vectors(m, n)
    quotient = fricke_quotient(r, s, t, prec)
    if not quotient.is_rational():
        raise ModularUnitsError(f"f^1_({m},{n}) has irrational coefficients")
    if cross_check:
        siegel_form = weierstrass_unit_siegel_form(m, n, prec)
        if not quotient.agrees_with(siegel_form):
            raise ModularUnitsError(f"Fricke and Siegel forms of f^1_({m},{n}) disagree")
    return quotient
