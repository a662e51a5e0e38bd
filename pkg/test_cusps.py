#!/usr/bin/env python3
"""
Tests for cusp enumeration, cusp matrices and values of Siegel products at cusps.
"""

from fractions import Fraction
from math import gcd

import numpy as np
import pytest

from cusps import (Cusp, UnimodularMatrix, cusp_list_gamma1, cusp_list_gamma_upper1, cusp_value, cusp_values,
                   equivalent_under_gamma1, equivalent_under_gamma_upper1, matrix_for_cusp)
from errors import PreconditionError
from generators import HAUPTMODUL_TABLE, load_golden_tables
from modfunc import RationalVector, SiegelProduct, siegel_product_expand, transform_siegel_product
from qseries import CuspLimitKind

GOLDEN = load_golden_tables()


@pytest.mark.parametrize("n", sorted(GOLDEN))
def test_cusp_lists_match_tables(n):
    assert [str(s) for s in cusp_list_gamma1(n)] == GOLDEN[n].cusps_gamma1
    assert [str(s) for s in cusp_list_gamma_upper1(n)] == GOLDEN[n].cusps_gamma_upper1


@pytest.mark.parametrize("n, count", [(5, 4), (7, 6), (8, 6), (9, 8), (10, 8), (12, 10)])
def test_cusp_counts(n, count):
    assert len(cusp_list_gamma1(n)) == count


@pytest.mark.parametrize("n", [5, 6, 8, 12])
def test_cusp_list_is_complete_and_irredundant(n):
    listing = cusp_list_gamma1(n)
    for i, s in enumerate(listing):
        for t in listing[i + 1:]:
            assert not equivalent_under_gamma1(s, t, n)
    for c in range(1, 2 * n + 1):
        for a in range(-c, 2 * c):
            if gcd(a, c) == 1:
                assert any(equivalent_under_gamma1(Cusp(a, c), s, n) for s in listing)


def test_matrix_for_cusp():
    assert matrix_for_cusp(Cusp(5, 2)) == UnimodularMatrix(5, 2, 2, 1)
    assert matrix_for_cusp(Cusp(0, 1)) == UnimodularMatrix(0, -1, 1, 0)
    assert matrix_for_cusp(Cusp.infinity()) == UnimodularMatrix.identity()
    for s in cusp_list_gamma_upper1(12):
        assert matrix_for_cusp(s).act(Cusp.infinity()) == s


def test_unimodular_matrix():
    with pytest.raises(PreconditionError):
        UnimodularMatrix(1, 1, 1, 1)
    gamma = UnimodularMatrix(5, 2, 2, 1)
    assert gamma @ gamma.inverse() == UnimodularMatrix.identity()
    assert UnimodularMatrix(1, 1, 5, 6).in_gamma1(5)
    assert not UnimodularMatrix(1, 1, 5, 6).in_gamma_upper1(5)
    assert UnimodularMatrix(1, 5, 1, 6).in_gamma_upper1(5)


def test_cusp_normalization_and_parsing():
    assert Cusp(2, -4) == Cusp(-1, 2)
    assert Cusp(-3, 0) == Cusp.infinity()
    assert Cusp.parse("oo").is_infinity
    assert Cusp.parse("5/2") == Cusp(5, 2)
    assert str(Cusp(4, 2)) == "2"
    assert Cusp(1, 2).scaled(5) == Cusp(5, 2)
    with pytest.raises(PreconditionError):
        Cusp.parse("x")
    with pytest.raises(PreconditionError):
        Cusp(0, 0)


def test_equivalence():
    assert equivalent_under_gamma1(Cusp(1, 5), Cusp(4, 5), 5)
    assert not equivalent_under_gamma1(Cusp(1, 5), Cusp(2, 5), 5)
    assert equivalent_under_gamma1(Cusp(0, 1), Cusp(1, 1), 5)
    assert equivalent_under_gamma1(Cusp(1, 5), Cusp.infinity(), 5)
    assert equivalent_under_gamma_upper1(Cusp(5, 2), Cusp(5, 3), 5)
    assert not equivalent_under_gamma_upper1(Cusp(5, 2), Cusp(2, 1), 5)


def test_hauptmodul_of_level_five_at_its_cusps():
    product = HAUPTMODUL_TABLE[5].product
    assert cusp_value(product, Cusp.infinity()).kind is CuspLimitKind.POLE
    assert cusp_value(product, Cusp(2, 1)).kind is CuspLimitKind.ZERO_AT_INFINITY
    at_zero = cusp_value(product, Cusp(0, 1))
    assert at_zero.kind is CuspLimitKind.FINITE
    assert abs(at_zero.value.to_complex() - 11.0902) < 1e-3
    at_five_halves = cusp_value(product, Cusp(5, 2))
    assert abs(at_five_halves.value.to_complex() + 0.0902) < 1e-3


def test_cusp_values_in_parallel_keep_order():
    product = HAUPTMODUL_TABLE[6].product
    cusps = [Cusp(0, 1), Cusp(3, 1), Cusp(2, 1)]
    serial = cusp_values(product, cusps)
    parallel = cusp_values(product, cusps, jobs=2)
    assert [limit.finite_value for limit in serial] == [limit.finite_value for limit in parallel]
    assert [limit.finite_value.to_rational() for limit in serial] == [8, -1, 0]


@pytest.mark.parametrize("n", [5, 6, 8, 9, 12])
def test_gamma1_equivalence_is_an_equivalence_relation(n):
    rng = np.random.default_rng(300 + n)
    sample = []
    while len(sample) < 12:
        c = int(rng.integers(1, 3 * n))
        a = int(rng.integers(-2 * c, 2 * c))
        if gcd(a, c) == 1:
            sample.append(Cusp(a, c))
    sample.append(Cusp.infinity())
    for s in sample:
        assert equivalent_under_gamma1(s, s, n)
        for t in sample:
            assert equivalent_under_gamma1(s, t, n) == equivalent_under_gamma1(t, s, n)
            if not equivalent_under_gamma1(s, t, n):
                continue
            for u in sample:
                if equivalent_under_gamma1(t, u, n):
                    assert equivalent_under_gamma1(s, u, n)


@pytest.mark.parametrize("n, s", [(5, Cusp(0, 1)), (5, Cusp(5, 2)), (6, Cusp(0, 1)), (6, Cusp(3, 1))])
def test_cusp_value_ignores_translations(n, s):
    product = HAUPTMODUL_TABLE[n].product
    gamma = matrix_for_cusp(s)
    expected = cusp_value(product, s)
    assert expected.kind is CuspLimitKind.FINITE
    for shift in (1, 2):
        moved = transform_siegel_product(product, gamma @ UnimodularMatrix(1, shift, 0, 1))
        limit = siegel_product_expand(moved, 1).constant_term_or_order()
        assert limit.kind is CuspLimitKind.FINITE
        assert limit.finite_value == expected.finite_value


def test_cusp_value_at_exact_zero_order():
    product = HAUPTMODUL_TABLE[4].product
    assert cusp_value(product, Cusp(2, 1)).kind is CuspLimitKind.ZERO_AT_INFINITY
    assert [limit.finite_value.to_rational() for limit in cusp_values(product, [Cusp(0, 1)])] == [16]


def test_cusp_value_rejects_bad_products():
    product = SiegelProduct.from_factors([(RationalVector(Fraction(1, 5), 0), 5)])
    with pytest.raises(PreconditionError):
        cusp_value(product, Cusp(0, 1))


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
