#!/usr/bin/env python3
"""
Tests for cyclotomic numbers and rational polynomials.
"""

from fractions import Fraction
from math import gcd

import numpy as np
import pytest

from errors import ModularUnitsError, PreconditionError
from exact_arith import CyclotomicNumber, RationalPolynomial, embed, euler_phi, galois_apply, minimal_polynomial


def random_number(rng, conductor):
    coords = [Fraction(int(a), int(b)) for a, b in zip(rng.integers(-9, 10, size=conductor),
                                                      rng.integers(1, 6, size=conductor))]
    return CyclotomicNumber(conductor, coords)


def test_roots_of_unity():
    zeta8 = CyclotomicNumber.zeta(8)
    assert zeta8 ** 4 == -1
    assert zeta8 ** 2 == CyclotomicNumber.zeta(4)
    assert zeta8 ** 8 == 1
    assert CyclotomicNumber.root_of_unity(Fraction(1, 2)) == -1
    assert CyclotomicNumber.zeta(3) + CyclotomicNumber.zeta(3, 2) == -1


def test_rational_values_drop_to_conductor_one():
    value = CyclotomicNumber.zeta(3) + CyclotomicNumber.zeta(3, 2)
    assert value.conductor == 1
    assert value.is_rational()
    assert value.to_rational() == -1


def test_field_axioms():
    rng = np.random.default_rng(7)
    for conductor in (5, 8, 12):
        for _ in range(5):
            a, b, c = (random_number(rng, conductor) for _ in range(3))
            assert a * (b + c) == a * b + a * c
            assert (a - b) + b == a
            if not a.is_zero():
                assert a * a.inverse() == 1
                assert (b / a) * a == b


def test_mixed_conductors_embed():
    i = CyclotomicNumber.zeta(4)
    omega = CyclotomicNumber.zeta(3)
    assert (i * omega).conductor == 12
    assert (i * omega) == CyclotomicNumber.zeta(12, 7)
    assert embed(omega, 12) == CyclotomicNumber.zeta(12, 4)
    with pytest.raises(PreconditionError):
        omega.embed(8)


def test_reduced_finds_smallest_field():
    assert CyclotomicNumber.zeta(12, 3).conductor == 4
    i_at_12 = CyclotomicNumber.zeta(4).embed(12)
    assert i_at_12.conductor == 12
    assert i_at_12.reduced().conductor == 4
    sqrt5 = CyclotomicNumber.from_powers(5, {1: 2, 4: 2}) + 1
    assert sqrt5 * sqrt5 == 5
    assert sqrt5.embed(20).reduced().conductor == 5


def test_galois_action():
    zeta5 = CyclotomicNumber.zeta(5)
    assert galois_apply(2, zeta5) == CyclotomicNumber.zeta(5, 2)
    assert len(zeta5.conjugates()) == 4
    real = zeta5 + CyclotomicNumber.zeta(5, 4)
    assert len(real.conjugates()) == 2
    with pytest.raises(PreconditionError):
        zeta5.galois_apply(5)


def test_irrational_numbers_print_in_their_own_field():
    assert str(CyclotomicNumber.zeta(5)) == "ζ5"
    assert str(CyclotomicNumber.zeta(4).embed(12)) == "ζ4"
    assert str(-CyclotomicNumber.zeta(7, 2)) == "-ζ7^2"
    assert CyclotomicNumber.zeta(5).reduced().conductor == 5
    assert hash(CyclotomicNumber.zeta(4).embed(12)) == hash(CyclotomicNumber.zeta(4))


@pytest.mark.parametrize("n", [5, 8, 12])
def test_galois_action_composes(n):
    rng = np.random.default_rng(11 + n)
    units = [d for d in range(1, n) if gcd(d, n) == 1]
    for _ in range(5):
        c = random_number(rng, n)
        for d in units:
            for e in units:
                assert c.galois_apply(d).galois_apply(e) == c.galois_apply(d * e % n)


@pytest.mark.parametrize("n", [5, 7, 8, 9, 12])
def test_minimal_polynomial_degree_divides_totient(n):
    rng = np.random.default_rng(23 + n)
    for _ in range(5):
        c = random_number(rng, n)
        polynomial = minimal_polynomial(c)
        assert euler_phi(c.conductor) % polynomial.degree == 0
        assert polynomial(c).is_zero()


def test_minimal_polynomials():
    assert minimal_polynomial(CyclotomicNumber.zeta(5)) == RationalPolynomial([1, 1, 1, 1, 1])
    golden_ratio_conjugate = CyclotomicNumber.zeta(5) + CyclotomicNumber.zeta(5, 4)
    assert minimal_polynomial(golden_ratio_conjugate) == RationalPolynomial([-1, 1, 1])
    assert minimal_polynomial(Fraction(16)) == RationalPolynomial([-16, 1])
    assert minimal_polynomial(CyclotomicNumber.zeta(4)) == RationalPolynomial([1, 0, 1])
    assert minimal_polynomial(CyclotomicNumber.zeta(5)).is_irreducible()


def test_multiplicative_order():
    assert CyclotomicNumber.zeta(12, 5).multiplicative_order() == 12
    assert CyclotomicNumber.rational(-1).multiplicative_order() == 2
    assert CyclotomicNumber.rational(2).multiplicative_order() is None


def test_to_complex():
    assert abs(CyclotomicNumber.zeta(4).to_complex() - 1j) < 1e-12
    assert abs(CyclotomicNumber.zeta(8).to_complex() - complex(np.exp(1j * np.pi / 4))) < 1e-12


def test_division_by_zero():
    with pytest.raises(PreconditionError):
        CyclotomicNumber.zero().inverse()


def test_to_rational_rejects_irrational():
    with pytest.raises(ModularUnitsError):
        CyclotomicNumber.zeta(3).to_rational()


def test_polynomial_arithmetic():
    x = RationalPolynomial.x()
    p = x * x - 11 * x - 1
    assert p.degree == 2
    assert p(Fraction(0)) == -1
    quotient, remainder = divmod(p * (x - 16) + 3, x - 16)
    assert quotient == p
    assert remainder == 3
    assert str(x ** 2 + 3) == "x**2 + 3"
    assert RationalPolynomial([2, 4]).monic() == RationalPolynomial([Fraction(1, 2), 1])


def test_polynomial_evaluates_at_cyclotomic_numbers():
    sqrt5 = CyclotomicNumber.from_powers(5, {1: 2, 4: 2}) + 1
    value = (sqrt5 * 5 + 11) / 2
    assert RationalPolynomial([-1, -11, 1])(value).is_zero()


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
