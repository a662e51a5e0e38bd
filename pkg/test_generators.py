#!/usr/bin/env python3
"""
Tests for hauptmoduln, cusp values, minimal polynomials, the expression
algorithm, Fricke families and Weierstrass units.
"""

from fractions import Fraction

import numpy as np
import pytest

from cusps import Cusp
from errors import GradingError, ModularUnitsError, NotInRingError, PreconditionError, PrecisionError
from exact_arith import CyclotomicNumber, RationalPolynomial
from generators import (HAUPTMODUL_TABLE, CuspValueSet, ExpressionResult, HauptmodulSpec, Variant,
                        compute_tables, conjugate_count, cusp_value_set, express_in_generators,
                        family_equivariance_check, fricke_family_component, galois_closure_check, generator_set,
                        hauptmodul_series, load_golden_tables, minpoly_set, vandermonde_discriminant,
                        weierstrass_conjugate_vectors)
from modfunc import RationalVector, SiegelProduct, fricke_difference_valuation, weierstrass_unit
from qseries import PuiseuxSeries

F = Fraction
GOLDEN = load_golden_tables()
LEVELS = sorted(HAUPTMODUL_TABLE)


def vec(a, b):
    return RationalVector(F(a), F(b))


def test_golden_tables_cover_every_level():
    assert sorted(GOLDEN) == LEVELS


@pytest.mark.parametrize("n", LEVELS)
def test_cusp_values_match_tables(n):
    computed = cusp_value_set(n).values
    expected = GOLDEN[n].values()
    assert len(computed) == len(expected)
    for value in expected:
        assert any(value == c for c in computed), f"{value} missing from C_{n}"


@pytest.mark.parametrize("n", LEVELS)
def test_cusp_values_pair_with_cusps(n):
    values = cusp_value_set(n)
    assert [str(s) for s in values.cusps] == GOLDEN[n].cusps_gamma_upper1[:-1]
    assert values.values == GOLDEN[n].values()


def test_worked_example_at_five_halves():
    value = cusp_value_set(5).value_at(Cusp(5, 2))
    sqrt5 = CyclotomicNumber.from_powers(5, {1: 2, 4: 2}) + 1
    assert value == (11 - sqrt5 * 5) / 2
    assert cusp_value_set(5).value_at(Cusp(2, 1)) == 0
    with pytest.raises(PreconditionError):
        cusp_value_set(5).value_at(Cusp(1, 3))


@pytest.mark.parametrize("n", LEVELS)
def test_minimal_polynomials_match_tables(n):
    computed = minpoly_set(n)
    expected = sorted(GOLDEN[n].polynomials(), key=RationalPolynomial.sort_key)
    assert list(computed) == expected
    values = cusp_value_set(n).values
    for polynomial in computed:
        assert polynomial.leading_coefficient == 1
        assert polynomial.is_irreducible()
        assert sum(1 for c in values if polynomial(c).is_zero()) == polynomial.degree


@pytest.mark.parametrize("n", LEVELS)
def test_galois_closure(n):
    assert galois_closure_check(cusp_value_set(n))


def test_galois_closure_detects_missing_conjugates():
    assert not galois_closure_check(CuspValueSet(5, ((Cusp(0, 1), CyclotomicNumber.zeta(5)),)))
    assert galois_closure_check(CuspValueSet(2, ((Cusp(0, 1), CyclotomicNumber.zero()),)))


def test_hauptmodul_series_variants():
    g = hauptmodul_series(5, Variant.GAMMA1, 6)
    assert g.valuation == -1
    assert g.ramification == 1
    assert g.leading_coefficient == 1
    upper = hauptmodul_series(5, Variant.GAMMA_UPPER1, 1)
    assert upper.valuation == F(-1, 5)
    assert upper.rescale_tau(5).agrees_with(hauptmodul_series(5, Variant.GAMMA1, 5))
    with pytest.raises(PreconditionError):
        hauptmodul_series(11, Variant.GAMMA1, 5)


@pytest.mark.parametrize("n", LEVELS)
def test_hauptmodul_is_rational_to_thirty_terms(n):
    g = hauptmodul_series(n, Variant.GAMMA1, 29)
    assert g.is_rational()
    assert g.valuation == -1
    assert g.precision == 29


def test_hauptmodul_validation_rejects_bad_data():
    bad = HauptmodulSpec(5, SiegelProduct.from_factors([(vec(F(1, 5), 0), 12)]))
    with pytest.raises(ModularUnitsError):
        bad.validate()


def test_express_polynomial():
    g = hauptmodul_series(5, Variant.GAMMA_UPPER1, 4)
    result = express_in_generators(g ** 2 + 3, 5, 0)
    assert result.numerator == RationalPolynomial([3, 0, 1])
    assert result.denominator == ()
    assert str(result) == "g**2 + 3"


def test_express_inverse_of_minimal_polynomial():
    g = hauptmodul_series(4, Variant.GAMMA_UPPER1, 5)
    h = (g - 16).inverse()
    result = express_in_generators(h, 4, 1)
    assert result.numerator == RationalPolynomial([1])
    assert result.denominator == ((RationalPolynomial([-16, 1]), 1),)
    assert result.evaluate(5).agrees_with(h)


def test_express_with_per_cusp_profile():
    g = hauptmodul_series(6, Variant.GAMMA1, 8)
    h = (g + 1).inverse() ** 2
    result = express_in_generators(h, 6, {Cusp(1, 2): 2}, Variant.GAMMA1)
    assert result.numerator == RationalPolynomial([1])
    assert result.denominator == ((RationalPolynomial([1, 1]), 2),)


def random_element(rng, n, polynomials):
    degree = int(rng.integers(0, 4))
    coeffs = [F(int(rng.integers(-5, 6)), int(rng.integers(1, 4))) for _ in range(degree + 1)]
    if coeffs[-1] == 0:
        coeffs[-1] = F(1)
    exponents = tuple((p, int(rng.integers(0, 3))) for p in polynomials)
    return ExpressionResult(n, Variant.GAMMA1, RationalPolynomial(coeffs), exponents)


@pytest.mark.parametrize("n", [4, 5, 6])
def test_expression_round_trip(n):
    rng = np.random.default_rng(1000 + n)
    polynomials = minpoly_set(n)
    g = hauptmodul_series(n, Variant.GAMMA1, 14)
    for _ in range(100):
        element = random_element(rng, n, polynomials)
        h = element.numerator(g) * element.denominator_polynomial()(g).inverse()
        result = express_in_generators(h, n, 2, Variant.GAMMA1)
        assert result == element.canonical()


def test_express_errors():
    with pytest.raises(NotInRingError):
        express_in_generators(PuiseuxSeries.from_exponents({F(-1, 2): 1}, F(3)), 5, 0)
    with pytest.raises(NotInRingError):
        express_in_generators(PuiseuxSeries.from_exponents({F(0): CyclotomicNumber.zeta(5)}, F(3)), 5, 0)
    with pytest.raises(PrecisionError):
        express_in_generators(PuiseuxSeries.zero(F(0)), 5, 0)
    with pytest.raises(GradingError):
        express_in_generators(PuiseuxSeries.constant(1, weight=2), 5, 0)
    with pytest.raises(PreconditionError):
        express_in_generators(PuiseuxSeries.one(), 11, 0)


def test_family_component_at_level_m_is_the_hauptmodul():
    component = fricke_family_component(5, 5, vec(F(1, 5), 0), 2)
    assert component.siegel_part.agrees_with(hauptmodul_series(5, Variant.GAMMA_UPPER1, 2))
    assert component.fricke_part.is_zero()


def test_family_component_fricke_part_is_the_weierstrass_unit():
    component = fricke_family_component(10, 5, vec(F(1, 10), 0), 2)
    assert component.fricke_part.agrees_with(weierstrass_unit(5, 10, 2))


def test_family_preconditions():
    with pytest.raises(PreconditionError):
        fricke_family_component(10, 4, vec(F(1, 10), 0), 2)
    with pytest.raises(PreconditionError):
        fricke_family_component(16, 8, vec(F(1, 16), 0), 2)
    with pytest.raises(PreconditionError):
        fricke_family_component(8, 4, vec(F(1, 4), 0), 2)


@pytest.mark.parametrize("n, m, d, r", [
    (8, 4, 3, None),
    (5, 5, 2, None),
    (5, 5, 2, (F(1, 5), F(1, 5))),
])
def test_family_equivariance(n, m, d, r):
    assert family_equivariance_check(n, m, d, 2, None if r is None else vec(*r))


def test_family_equivariance_needs_coprime_d():
    with pytest.raises(PreconditionError):
        family_equivariance_check(8, 4, 2, 2)


@pytest.mark.parametrize("m, n, count", [(4, 8, 4), (5, 10, 3), (6, 12, 4), (4, 12, 8)])
def test_conjugate_vectors(m, n, count):
    vectors = weierstrass_conjugate_vectors(m, n)
    assert len(vectors) == count == conjugate_count(m, n)


def test_conjugate_vectors_of_level_eight():
    assert weierstrass_conjugate_vectors(4, 8) == [vec(F(1, 8), 0), vec(F(1, 8), F(1, 2)),
                                                   vec(F(5, 8), 0), vec(F(5, 8), F(1, 2))]
    with pytest.raises(PreconditionError):
        weierstrass_conjugate_vectors(3, 6)


def test_vandermonde_product_is_rational():
    vectors = weierstrass_conjugate_vectors(4, 8)
    pairs = [(vectors[i], vectors[j]) for i in range(4) for j in range(i + 1, 4)]
    expected = 2 * sum(fricke_difference_valuation(u, v) for u, v in pairs) \
        - 12 * fricke_difference_valuation(vec(F(2, 4), 0), vec(F(1, 4), 0))
    report = vandermonde_discriminant(4, 8, expected + 1)
    assert report.degree == 4
    assert report.is_rational
    assert report.series.valuation == expected
    assert not report.leading_coefficient.is_zero()


def test_generator_sets():
    assert generator_set(8).weierstrass is None
    assert generator_set(8).minpolys == minpoly_set(8)
    assert generator_set(16).weierstrass == (4, 16)
    assert generator_set(20).weierstrass == (5, 20)
    assert generator_set(14).hauptmodul.level == 7
    assert len(generator_set(16).describe()) == 1 + len(minpoly_set(4)) + 1
    for n in (11, 13):
        with pytest.raises(PreconditionError):
            generator_set(n)


def test_compute_tables_follow_input_order():
    tables = compute_tables([6, 4], jobs=2)
    assert [t.level for t in tables] == [6, 4]
    assert tables[1].cusps_gamma_upper1 == GOLDEN[4].cusps_gamma_upper1
    assert len(tables[0].cusp_values) == len(GOLDEN[6].cusp_values)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
