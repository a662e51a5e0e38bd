"""
Generators of the rings of weakly holomorphic modular functions with rational
coefficients for Gamma_1(N) and Gamma^1(N).

For 2 <= N <= 10 and N = 12 the ring is generated by the hauptmodul g and the
inverses f(g)^-1 of the minimal polynomials of its cusp values.  Composite N
divisible by m in {4, 5, 6, 7, 9} add the Weierstrass unit f^1_{m,N}.
"""

import json
import logging
import math
import os
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from joblib import Parallel, delayed
from pydantic import BaseModel
from sympy import primefactors

from cusps import Cusp, cusp_list_gamma1, cusp_list_gamma_upper1, cusp_values
from errors import GradingError, ModularUnitsError, NotInRingError, PreconditionError, PrecisionError
from exact_arith import CyclotomicNumber, RationalPolynomial, minimal_polynomial
from modfunc import (RationalVector, SiegelProduct, fricke, fricke_difference_valuation, fricke_quotient,
                     modularity_criterion, siegel_product_expand)
from qseries import CuspLimitKind, CyclotomicPayload, PuiseuxSeries

logger = logging.getLogger(__name__)

GOLDEN_PATH = os.path.join(os.path.dirname(os.path.abspath(__file__)), "golden", "generator_tables.json")

FAMILY_LEVELS = (4, 5, 6, 7, 9)

# level -> {k: exponent of g_[k/N, 0]}
_HAUPTMODUL_DATA: Dict[int, Dict[int, int]] = {
    2: {1: 12},
    3: {1: 12},
    4: {2: 8, 1: -8},
    5: {2: 5, 1: -5},
    6: {3: 3, 1: -3},
    7: {2: 2, 3: 1, 1: -3},
    8: {3: 2, 1: -2},
    9: {2: 1, 4: 1, 1: -2},
    10: {3: 1, 4: 1, 1: -1, 2: -1},
    12: {5: 1, 1: -1},
}


class Variant(str, Enum):
    GAMMA1 = "gamma1"
    GAMMA_UPPER1 = "gamma_upper1"


@dataclass(frozen=True)
class HauptmodulSpec:
    """
    g^1_N as a Siegel product in tau; g_{1,N}(tau) = g^1_N(N tau).
    """

    level: int
    product: SiegelProduct

    def validate(self) -> None:
        if self.product.exponent_sum % 12:
            raise ModularUnitsError(f"hauptmodul of level {self.level} has exponent sum {self.product.exponent_sum}")
        for level in (self.level, self.level * self.level):
            holds, report = modularity_criterion(self.product.at_level(level))
            if not holds:
                raise ModularUnitsError(f"hauptmodul of level {self.level} fails the criterion: {report.as_dict()}")

    def __str__(self) -> str:
        return str(self.product)


def _build_table() -> Dict[int, HauptmodulSpec]:
    table = {}
    for n, data in _HAUPTMODUL_DATA.items():
        factors = [(RationalVector(Fraction(k, n), 0), m) for k, m in data.items()]
        spec = HauptmodulSpec(n, SiegelProduct.from_factors(factors, n))
        spec.validate()
        table[n] = spec
    return table


HAUPTMODUL_TABLE: Dict[int, HauptmodulSpec] = _build_table()


def hauptmodul_spec(n: int) -> HauptmodulSpec:
    if n not in HAUPTMODUL_TABLE:
        raise PreconditionError(f"no hauptmodul is tabulated for N = {n}; use 2..10 or 12")
    return HAUPTMODUL_TABLE[n]


@lru_cache(maxsize=128)
def hauptmodul_series(n: int, variant: Variant = Variant.GAMMA_UPPER1, prec=60) -> PuiseuxSeries:
    """
    q-expansion of g^1_N (in q^{1/N}) or of g_{1,N} (in q), known modulo q^prec.
    """
    spec = hauptmodul_spec(n)
    prec = Fraction(prec)
    if variant is Variant.GAMMA_UPPER1:
        series = siegel_product_expand(spec.product, prec + Fraction(1, n)).on_lattice(n)
    else:
        series = siegel_product_expand(spec.product, (prec + 1) / n).on_lattice(n).rescale_tau(n)
    if not series.is_rational():
        raise ModularUnitsError(f"hauptmodul of level {n} has irrational coefficients")
    return series.truncate(prec)


@dataclass(frozen=True)
class CuspValueSet:
    """C_N: values of g^1_N at the cusps of X^1(N) other than i-infinity, in cusp order."""

    level: int
    entries: Tuple[Tuple[Cusp, CyclotomicNumber], ...]

    @property
    def cusps(self) -> List[Cusp]:
        return [s for s, _ in self.entries]

    @property
    def values(self) -> List[CyclotomicNumber]:
        return [c for _, c in self.entries]

    def value_at(self, s: Cusp) -> CyclotomicNumber:
        for cusp, value in self.entries:
            if cusp == s:
                return value
        raise PreconditionError(f"{s} is not a listed cusp of X^1({self.level})")


@lru_cache(maxsize=32)
def cusp_value_set(n: int, prec=1, jobs: int = 1) -> CuspValueSet:
    """
    C_N, computed from the transformed Siegel products.

    A PrecisionError is retried once at doubled precision.
    """
    spec = hauptmodul_spec(n)
    cusps = [s for s in cusp_list_gamma_upper1(n) if not s.is_infinity]
    try:
        limits = cusp_values(spec.product, cusps, prec, jobs)
    except PrecisionError:
        logger.warning("cusp values of level %s need more precision; retrying at %s", n, 2 * prec)
        limits = cusp_values(spec.product, cusps, 2 * prec, jobs)
    entries = []
    for s, limit in zip(cusps, limits):
        if limit.kind is CuspLimitKind.POLE:
            raise ModularUnitsError(f"hauptmodul of level {n} has a pole at {s}")
        entries.append((s, limit.finite_value.reduced()))
    logger.info("C_%s computed at %s cusps", n, len(entries))
    return CuspValueSet(n, tuple(entries))


@lru_cache(maxsize=32)
def minpoly_set(n: int) -> Tuple[RationalPolynomial, ...]:
    """Distinct minimal polynomials of C_N over Q, sorted by degree then coefficients."""
    distinct: List[RationalPolynomial] = []
    for value in cusp_value_set(n).values:
        polynomial = minimal_polynomial(value)
        if polynomial not in distinct:
            distinct.append(polynomial)
    return tuple(sorted(distinct, key=RationalPolynomial.sort_key))


def galois_closure_check(values: CuspValueSet) -> bool:
    """Every Galois conjugate of every value is again a value."""
    members = values.values
    for value in members:
        for conjugate in value.conjugates():
            if not any(conjugate == other for other in members):
                logger.info("conjugate %s of %s is missing from C_%s", conjugate, value, values.level)
                return False
    return True


@dataclass(frozen=True)
class GeneratorSet:
    """Generators of O_{1,N}(Q) / O^1_N(Q): the hauptmodul of `hauptmodul.level`, the inverses
    of `minpolys` evaluated at it, and the Weierstrass unit f^1_{m,N} when `weierstrass` is set."""

    level: int
    hauptmodul: HauptmodulSpec
    minpolys: Tuple[RationalPolynomial, ...]
    weierstrass: Optional[Tuple[int, int]] = None

    def describe(self, variant: Variant = Variant.GAMMA_UPPER1) -> List[str]:
        base = self.hauptmodul.level
        g = f"g^1_{base}" if variant is Variant.GAMMA_UPPER1 else f"g_1,{base}"
        names = [g]
        for polynomial in self.minpolys:
            names.append(f"({str(polynomial).replace('x', g)})^-1")
        if self.weierstrass:
            m, n = self.weierstrass
            names.append(f"f^1_{m},{n}(tau)" if variant is Variant.GAMMA_UPPER1 else f"f^1_{m},{n}({n} tau)")
        return names


def generator_set(n: int) -> GeneratorSet:
    """
    Generator set for level N.

    Raises:
        PreconditionError: for levels with neither a tabulated hauptmodul nor a proper divisor in 4, 5, 6, 7, 9
    """
    if n in HAUPTMODUL_TABLE:
        return GeneratorSet(n, HAUPTMODUL_TABLE[n], minpoly_set(n))
    divisors = [m for m in FAMILY_LEVELS if n % m == 0 and n > m]
    if not divisors:
        raise PreconditionError(f"no generator set is known for N = {n}")
    m = max(divisors)
    return GeneratorSet(n, HAUPTMODUL_TABLE[m], minpoly_set(m), (m, n))


# -- expression in the generators ---------------------------------------------

@dataclass(frozen=True)
class ExpressionResult:
    """h = numerator(g) / prod f(g)^k with the f among the minimal polynomials of C_N."""

    level: int
    variant: Variant
    numerator: RationalPolynomial
    denominator: Tuple[Tuple[RationalPolynomial, int], ...]

    def canonical(self) -> "ExpressionResult":
        """Cancel common factors and drop zero exponents."""
        numerator = self.numerator
        reduced = []
        for polynomial, k in self.denominator:
            while k > 0 and not numerator.is_zero():
                quotient, remainder = divmod(numerator, polynomial)
                if not remainder.is_zero():
                    break
                numerator, k = quotient, k - 1
            if numerator.is_zero():
                k = 0
            if k:
                reduced.append((polynomial, k))
        reduced.sort(key=lambda item: item[0].sort_key())
        return ExpressionResult(self.level, self.variant, numerator, tuple(reduced))

    def denominator_polynomial(self) -> RationalPolynomial:
        product = RationalPolynomial([1])
        for polynomial, k in self.denominator:
            product = product * polynomial ** k
        return product

    def evaluate(self, prec) -> PuiseuxSeries:
        """Rebuild the series from the hauptmodul expansion."""
        g = hauptmodul_series(self.level, self.variant, prec)
        value = self.numerator(g)
        if not isinstance(value, PuiseuxSeries):
            value = PuiseuxSeries.constant(value)
        return value * self.denominator_polynomial()(g).inverse()

    def __str__(self) -> str:
        numerator = str(self.numerator).replace("x", "g")
        if not self.denominator:
            return numerator
        parts = [f"({str(p).replace('x', 'g')})" + (f"^{k}" if k > 1 else "") for p, k in self.denominator]
        return f"({numerator}) / ({' * '.join(parts)})"


def _denominator_exponents(values: CuspValueSet, polynomials: Sequence[RationalPolynomial],
                           pole_profile: Union[int, Mapping[Cusp, int]]) -> List[Tuple[RationalPolynomial, int]]:
    exponents = []
    for polynomial in polynomials:
        if isinstance(pole_profile, int):
            k = pole_profile
        else:
            k = 0
            for s, value in values.entries:
                if polynomial(value).is_zero():
                    k = max(k, math.ceil(pole_profile.get(s, 0)))
        if k < 0:
            raise PreconditionError("pole orders must be nonnegative")
        exponents.append((polynomial, k))
    return exponents


def express_in_generators(h: PuiseuxSeries, n: int, pole_profile: Union[int, Mapping[Cusp, int]],
                          variant: Variant = Variant.GAMMA_UPPER1) -> ExpressionResult:
    """
    Write h as P(g) / prod f(g)^k.

    Args:
        h: expansion of a weakly holomorphic function for the chosen group with rational coefficients
        n: level with a tabulated hauptmodul
        pole_profile: bound on the pole order at each finite cusp (or one bound for all); the cusps
            are those of X_1(N) for GAMMA1 and of X^1(N) for GAMMA_UPPER1
        variant: GAMMA_UPPER1 expands in q^{1/N}, GAMMA1 in q

    Raises:
        GradingError: if h has nonzero weight
        NotInRingError: if a residue cannot be matched by powers of g
        PrecisionError: if h is not known far enough to settle the constant term
    """
    if h.weight != 0:
        raise GradingError(f"expected a weight-0 series, got weight {h.weight}")
    values = cusp_value_set(n)
    if variant is Variant.GAMMA1 and not isinstance(pole_profile, int):
        pole_profile = {s.scaled(n): k for s, k in pole_profile.items()}
    exponents = _denominator_exponents(values, minpoly_set(n), pole_profile)
    denominator = RationalPolynomial([1])
    for polynomial, k in exponents:
        denominator = denominator * polynomial ** k

    local = Fraction(1, n) if variant is Variant.GAMMA_UPPER1 else Fraction(1)
    if h.precision is None:
        top = h.items()[-1][0] if h.items() else Fraction(0)
        h = h.truncate(max(top, Fraction(0)) + 1)
    lowest = min(h.valuation if h.valuation is not None else Fraction(0), Fraction(0))
    working = math.ceil(h.precision - lowest + denominator.degree * local) + 1
    g = hauptmodul_series(n, variant, working)

    residual = h * denominator(g)
    logger.debug("cleared denominators of degree %s; residual valuation %s", denominator.degree, residual.valuation)
    numerator: Dict[int, Fraction] = {}
    powers = {1: g}
    while residual.valuation is not None and residual.valuation < 0:
        ratio = -residual.valuation / local
        if ratio.denominator != 1:
            raise NotInRingError(f"pole q^{residual.valuation} is not a power of the hauptmodul's pole")
        j = int(ratio)
        if j not in powers:
            powers[j] = g ** j
        coefficient = residual.leading_coefficient / powers[j].leading_coefficient
        if not coefficient.is_rational():
            raise NotInRingError(f"coefficient {coefficient} of g^{j} is not rational")
        numerator[j] = coefficient.to_rational()
        residual = residual - powers[j].scale(numerator[j])
    if residual.precision is not None and residual.precision <= 0:
        raise PrecisionError(f"the constant term is beyond O(q^{residual.precision})")
    constant = residual.coefficient(Fraction(0))
    if not constant.is_rational():
        raise NotInRingError(f"constant term {constant} is not rational")
    numerator[0] = constant.to_rational()
    residual = residual - PuiseuxSeries.constant(constant)
    if not residual.is_zero():
        raise NotInRingError(f"residual {residual.format(3)} is not constant")
    polynomial = RationalPolynomial([numerator.get(i, 0) for i in range(max(numerator) + 1)])
    return ExpressionResult(n, variant, polynomial, tuple(exponents)).canonical()


# -- Fricke families and Weierstrass units ---------------------------------------

@dataclass(frozen=True)
class FamilyComponent:
    """The two generator components of a Fricke family of level N at the vector r."""

    level: int
    m: int
    vector: RationalVector
    siegel_part: PuiseuxSeries
    fricke_part: PuiseuxSeries


def _check_family_vector(n: int, m: int, r: RationalVector) -> None:
    if m not in FAMILY_LEVELS:
        raise PreconditionError(f"Fricke family components exist for m in {FAMILY_LEVELS}, got {m}")
    if n % m:
        raise PreconditionError(f"{m} does not divide {n}")
    a, b = r.r1 * n, r.r2 * n
    if a.denominator != 1 or b.denominator != 1 or gcd(gcd(int(a), int(b)), n) != 1:
        raise PreconditionError(f"{r} does not have primitive denominator {n}")


def family_siegel_product(n: int, m: int, r: RationalVector) -> SiegelProduct:
    """g^1_m transported to r: each g_[k/m, 0] becomes g_{(kN/m) r}."""
    factors = [(r.scale(v.r1 * n), e) for v, e in HAUPTMODUL_TABLE[m].product.factors]
    return SiegelProduct.from_factors(factors)


def fricke_family_component(n: int, m: int, r: RationalVector, prec) -> FamilyComponent:
    """
    The components (g_r, f_r) generating Fricke families of level N through level m.

    The Fricke part is zero when N = m.
    """
    _check_family_vector(n, m, r)
    siegel_part = siegel_product_expand(family_siegel_product(n, m, r), prec)
    step = Fraction(n, m)
    fricke_part = fricke_quotient(r, r.scale(step), r.scale(2 * step), prec)
    return FamilyComponent(n, m, r, siegel_part, fricke_part)


def family_equivariance_check(n: int, m: int, d: int, prec, r: Optional[RationalVector] = None) -> bool:
    """
    sigma_d applied coefficient-wise to the components at r equals the components at [r1, d r2].

    d is replaced by the first d + kN coprime to every conductor involved.
    """
    if gcd(d, n) != 1:
        raise PreconditionError(f"d = {d} is not coprime to {n}")
    r = r or RationalVector(Fraction(1, n), 0)
    component = fricke_family_component(n, m, r, prec)
    bound = 2 * n * n
    for series in (component.siegel_part, component.fricke_part):
        bound = bound * series.conductor() // gcd(bound, series.conductor())
    shifted = d % n or n
    while gcd(shifted, bound) != 1:
        shifted += n
    image = fricke_family_component(n, m, RationalVector(r.r1, shifted * r.r2), prec)
    siegel_ok = component.siegel_part.coefficients_galois(shifted).agrees_with(image.siegel_part)
    fricke_ok = component.fricke_part.coefficients_galois(shifted).agrees_with(image.fricke_part)
    logger.info("sigma_%s equivariance at level %s through %s: siegel %s, fricke %s",
                shifted, n, m, siegel_ok, fricke_ok)
    return siegel_ok and fricke_ok


def gamma_upper1_index(n: int) -> int:
    """Index of the image of Gamma^1(N) in PSL2(Z)."""
    index = Fraction(n * n)
    for p in primefactors(n):
        index *= 1 - Fraction(1, p * p)
    return int(index) if n <= 2 else int(index / 2)


def conjugate_count(m: int, n: int) -> int:
    """[Gamma^1(m) : Gamma^1(N)], the degree of F^1_N(Q) over F^1_m(Q)."""
    return gamma_upper1_index(n) // gamma_upper1_index(m)


def weierstrass_conjugate_vectors(m: int, n: int) -> List[RationalVector]:
    """
    Vectors [a/N, b/N] indexing the conjugates of f^1_{m,N} over F^1_m(Q):
    gcd(a, b, N) = 1, a = 1 and b = 0 modulo m.

    Raises:
        ModularUnitsError: if the count differs from [Gamma^1(m) : Gamma^1(N)]
    """
    if m < 4 or n % m or n == m:
        raise PreconditionError(f"need m >= 4 properly dividing N, got m={m}, N={n}")
    vectors = [RationalVector(Fraction(a, n), Fraction(b, n))
               for a in range(1, n, m) for b in range(0, n, m) if gcd(gcd(a, b), n) == 1]
    expected = conjugate_count(m, n)
    if len(vectors) != expected:
        raise ModularUnitsError(f"found {len(vectors)} conjugates of f^1_({m},{n}), expected {expected}")
    return vectors


@dataclass(frozen=True)
class VandermondeReport:
    m: int
    level: int
    degree: int
    series: PuiseuxSeries

    @property
    def is_rational(self) -> bool:
        return self.series.is_rational()

    @property
    def leading_coefficient(self) -> CyclotomicNumber:
        return self.series.leading_coefficient


def vandermonde_discriminant(m: int, n: int, prec) -> VandermondeReport:
    """prod_{i<j} (f_i - f_j)^2 over the conjugates f_i of f^1_{m,N}, modulo q^prec."""
    vectors = weierstrass_conjugate_vectors(m, n)
    s, t = RationalVector(Fraction(1, m), 0), RationalVector(Fraction(2, m), 0)
    pairs = [(vectors[i], vectors[j]) for i in range(len(vectors)) for j in range(i + 1, len(vectors))]
    pair_valuations = [fricke_difference_valuation(u, v) for u, v in pairs]
    base_valuation = fricke_difference_valuation(t, s)
    power = len(vectors) * (len(vectors) - 1)
    prec = Fraction(prec)
    relative = prec - (2 * sum(pair_valuations) - power * base_valuation)
    working = math.ceil(max(pair_valuations + [base_valuation]) + relative) + 1
    logger.info("Vandermonde product of %s conjugates of f^1_(%s,%s) at working precision %s",
                len(vectors), m, n, working)
    expansions = {v: fricke(v, working) for v in vectors}
    numerator = PuiseuxSeries.one()
    for u, v in pairs:
        difference = expansions[u] - expansions[v]
        numerator = numerator * difference * difference
    base = fricke(t, working) - fricke(s, working)
    series = (numerator * (base ** power).inverse()).truncate(prec)
    return VandermondeReport(m, n, len(vectors), series)


# -- tables ---------------------------------------------------------------------

class GoldenValue(BaseModel):
    conductor: int
    powers: Dict[str, str]

    def to_number(self) -> CyclotomicNumber:
        return CyclotomicNumber.from_powers(self.conductor, {int(k): Fraction(v) for k, v in self.powers.items()})


class LevelTable(BaseModel):
    level: int
    cusps_gamma1: List[str]
    cusps_gamma_upper1: List[str]
    cusp_values: List[GoldenValue]
    minpolys: List[List[str]]

    def polynomials(self) -> List[RationalPolynomial]:
        return [RationalPolynomial([Fraction(c) for c in coeffs]) for coeffs in self.minpolys]

    def values(self) -> List[CyclotomicNumber]:
        return [v.to_number() for v in self.cusp_values]


class GoldenTables(BaseModel):
    levels: List[LevelTable]


def load_golden_tables(path: str = GOLDEN_PATH) -> Dict[int, LevelTable]:
    with open(path, "r", encoding="utf-8") as f:
        tables = GoldenTables.model_validate(json.load(f))
    return {table.level: table for table in tables.levels}


class ComputedLevel(BaseModel):
    """Computed counterpart of a golden level table, for JSON output."""

    level: int
    cusps_gamma1: List[str]
    cusps_gamma_upper1: List[str]
    cusp_values: List[CyclotomicPayload]
    minpolys: List[List[str]]


def compute_level_table(n: int) -> ComputedLevel:
    values = cusp_value_set(n)
    return ComputedLevel(
        level=n,
        cusps_gamma1=[str(s) for s in cusp_list_gamma1(n)],
        cusps_gamma_upper1=[str(s) for s in cusp_list_gamma_upper1(n)],
        cusp_values=[CyclotomicPayload.from_number(c) for c in values.values],
        minpolys=[[str(c) for c in p.coeffs] for p in minpoly_set(n)],
    )


def compute_tables(levels: Sequence[int], jobs: int = 1) -> List[ComputedLevel]:
    """Per-level tables, optionally in parallel; the output follows the input order."""
    if jobs == 1:
        return [compute_level_table(n) for n in levels]
    return Parallel(n_jobs=jobs)(delayed(compute_level_table)(n) for n in levels)
