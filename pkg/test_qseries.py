#!/usr/bin/env python3
"""
Tests for truncated Puiseux series arithmetic.
"""

import json
from fractions import Fraction

import pytest

from errors import GradingError, PreconditionError, PrecisionError
from exact_arith import CyclotomicNumber
from qseries import CuspLimitKind, PuiseuxSeries, SeriesPayload

F = Fraction


def series(terms, precision=None, weight=0):
    return PuiseuxSeries.from_exponents({F(e): c for e, c in terms.items()},
                                        None if precision is None else F(precision), weight)


def test_multiplication_precision():
    a = series({0: 1, 1: 1}, 3)
    b = series({F(1, 2): 1}, 2)
    product = a * b
    assert product.precision == 2
    assert product.items() == [(F(1, 2), CyclotomicNumber.one()), (F(3, 2), CyclotomicNumber.one())]
    assert product.ramification == 2


def test_exact_series_multiply_exactly():
    one_plus_q = series({0: 1, 1: 1})
    cube = one_plus_q ** 3
    assert cube.is_exact()
    assert [c.to_rational() for _, c in cube.items()] == [1, 3, 3, 1]


def test_inverse_keeps_relative_precision():
    a = series({-1: 1, 0: 1}, 2)
    inverse = a.inverse()
    assert inverse.valuation == 1
    assert inverse.precision == 4
    assert [(e, c.to_rational()) for e, c in inverse.items()] == [(1, 1), (2, -1), (3, 1)]
    assert (a * inverse).agrees_with(PuiseuxSeries.one())


def test_inverse_of_exact_series_needs_precision():
    geometric = series({0: 1, 1: -1}).inverse(relative_precision=F(5))
    assert geometric.precision == 5
    assert all(c == 1 for _, c in geometric.items())
    assert len(geometric.items()) == 5
    with pytest.raises(PrecisionError):
        series({0: 1, 1: -1}).inverse()


def test_inverse_of_zero():
    with pytest.raises(PreconditionError):
        PuiseuxSeries.zero(F(5)).inverse()


def test_addition_takes_minimum_precision():
    total = series({0: 1}, 3) + series({F(1, 3): 2}, F(5, 3))
    assert total.precision == F(5, 3)
    assert total.coefficient(F(1, 3)) == 2


def test_weight_mismatch_is_a_grading_error():
    with pytest.raises(GradingError):
        PuiseuxSeries.one() + PuiseuxSeries.constant(1, weight=2)


def test_rescale_tau():
    a = series({F(1, 5): 1, F(2, 5): 2}, 1)
    rescaled = a.rescale_tau(5)
    assert rescaled.precision == 5
    assert rescaled.coefficient(1) == 1 and rescaled.coefficient(2) == 2
    assert rescaled.rescale_tau(F(1, 5)) == a
    with pytest.raises(PreconditionError):
        a.rescale_tau(-1)


def test_on_lattice_rounds_precision_down():
    a = series({F(1, 2): 1}, F(7, 4))
    assert a.on_lattice(2).precision == F(3, 2)
    with pytest.raises(PreconditionError):
        series({F(1, 3): 1}, 2).on_lattice(2)


def test_constant_term_or_order():
    assert series({-1: 1, 0: 3}, 1).constant_term_or_order().kind is CuspLimitKind.POLE
    assert series({F(-1, 2): 1}, 1).constant_term_or_order().order == F(1, 2)
    finite = series({0: 3, 1: 1}, 2).constant_term_or_order()
    assert finite.kind is CuspLimitKind.FINITE and finite.value == 3
    assert series({1: 1}, 2).constant_term_or_order().kind is CuspLimitKind.ZERO_AT_INFINITY
    with pytest.raises(PrecisionError):
        PuiseuxSeries.zero(F(0)).constant_term_or_order()
    with pytest.raises(GradingError):
        series({0: 1}, 2, weight=2).constant_term_or_order()


def test_coefficient_outside_window():
    with pytest.raises(PrecisionError):
        series({0: 1}, 2).coefficient(2)
    assert series({0: 1}, 2).coefficient(F(1, 7)) == 0


def test_coefficients_galois():
    a = series({1: CyclotomicNumber.zeta(5)}, 3)
    assert a.coefficients_galois(2).coefficient(1) == CyclotomicNumber.zeta(5, 2)
    assert not a.is_rational()
    assert a.conductor() == 5


def test_truncate_and_agreement():
    a = series({0: 1, 1: 1}, 2)
    b = series({0: 1, 1: 1, 3: 5})
    assert a.agrees_with(b)
    assert b.truncate(2) == a
    assert not a.agrees_with(series({0: 1}))


def test_payload_round_trip_through_json():
    a = series({F(-1, 3): CyclotomicNumber.zeta(12, 5), F(2, 3): F(-7, 2)}, 4, weight=4)
    text = json.dumps(a.to_payload().model_dump())
    restored = PuiseuxSeries.from_payload(SeriesPayload.model_validate(json.loads(text)))
    assert restored == a
    assert restored.weight == 4


def test_format():
    assert str(series({-1: 1, 0: 744}, 1)) == "q^-1 + 744 + O(q)"
    assert str(series({F(1, 2): CyclotomicNumber.zeta(4)}, 1)) == "(ζ4)*q^(1/2) + O(q)"
    assert str(PuiseuxSeries.zero(F(2))) == "O(q^2)"


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
