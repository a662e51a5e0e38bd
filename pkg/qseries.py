"""
Truncated Puiseux series in q = e^{2 pi i tau} with cyclotomic coefficients.

Exponents are stored as integers k meaning q^{k/M} for the series' ramification M.
A series is known modulo q^{P/M}; P = None marks an exact finite Laurent polynomial.
Every series also carries a two-pi weight w: the represented function is
(2 pi)^{w/2} times the series, so g2, g3, eta, Delta and wp stay exact.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from math import gcd
from typing import Dict, List, Optional, Tuple, Union

from pydantic import BaseModel

from errors import GradingError, PreconditionError, PrecisionError
from exact_arith import CyclotomicNumber, Scalar

logger = logging.getLogger(__name__)

Coefficient = Union[CyclotomicNumber, Scalar]


def _bound(units: Optional[int]) -> float:
    return math.inf if units is None else units


def _lcm(a: int, b: int) -> int:
    return a // gcd(a, b) * b


def _as_coefficient(value: Coefficient) -> CyclotomicNumber:
    if isinstance(value, CyclotomicNumber):
        return value
    return CyclotomicNumber.rational(value)


class SeriesPayload(BaseModel):
    """JSON form of a series: terms are [k, conductor, [coords...]] with coords as strings."""

    M: int
    w: int
    P: Optional[int]
    terms: List[Tuple[int, int, List[str]]]


class CyclotomicPayload(BaseModel):
    conductor: int
    coords: List[str]
    text: str

    @classmethod
    def from_number(cls, value: CyclotomicNumber) -> "CyclotomicPayload":
        value = value.reduced()
        return cls(conductor=value.conductor, coords=[str(c) for c in value.coords], text=str(value))

    def to_number(self) -> CyclotomicNumber:
        return CyclotomicNumber(self.conductor, [Fraction(c) for c in self.coords])


class CuspLimitKind(str, Enum):
    ZERO_AT_INFINITY = "zero"
    FINITE = "finite"
    POLE = "pole"


@dataclass(frozen=True)
class CuspLimit:
    """Behaviour of a weight-0 series at q = 0."""

    kind: CuspLimitKind
    value: Optional[CyclotomicNumber] = None
    order: Optional[Fraction] = None

    @property
    def finite_value(self) -> CyclotomicNumber:
        """Value at the cusp, 0 for ZERO_AT_INFINITY; poles have none."""
        if self.kind is CuspLimitKind.POLE:
            raise PreconditionError("a pole has no finite value")
        return self.value if self.kind is CuspLimitKind.FINITE else CyclotomicNumber.zero()

    def __str__(self) -> str:
        if self.kind is CuspLimitKind.FINITE:
            return str(self.value)
        if self.kind is CuspLimitKind.POLE:
            return f"pole of order {self.order}"
        return "0"


class PuiseuxSeries:
    """
    sum_k c_k q^{k/M} + O(q^{P/M}) with two-pi weight w.

    Instances are immutable; the ramification is kept as small as the stored
    exponents and precision allow.
    """

    __slots__ = ("ramification", "_terms", "_keys", "_precision", "weight")

    def __init__(self, terms: Optional[Dict[int, Coefficient]] = None, ramification: int = 1,
                 precision: Optional[int] = None, weight: int = 0):
        """
        Args:
            terms: exponent numerator k -> coefficient of q^{k/M}
            ramification: M
            precision: P in units of 1/M, None for an exact Laurent polynomial
            weight: two-pi weight w
        """
        if ramification < 1:
            raise PreconditionError(f"ramification must be positive, got {ramification}")
        cleaned: Dict[int, CyclotomicNumber] = {}
        for k, c in (terms or {}).items():
            if precision is not None and k >= precision:
                continue
            c = _as_coefficient(c)
            if not c.is_zero():
                cleaned[int(k)] = c
        step = ramification
        for k in cleaned:
            step = gcd(step, k)
        if precision is not None:
            step = gcd(step, precision)
        if step > 1:
            cleaned = {k // step: c for k, c in cleaned.items()}
            ramification //= step
            precision = None if precision is None else precision // step
        self.ramification = ramification
        self._terms = cleaned
        self._keys = tuple(sorted(cleaned))
        self._precision = precision
        self.weight = weight

    # -- constructors ---------------------------------------------------------

    @classmethod
    def from_exponents(cls, terms: Dict[Fraction, Coefficient], precision: Optional[Fraction] = None,
                       weight: int = 0) -> "PuiseuxSeries":
        """Build from rational q-exponents; the ramification is the lcm of all denominators."""
        ramification = 1
        for e in terms:
            ramification = _lcm(ramification, Fraction(e).denominator)
        if precision is not None:
            precision = Fraction(precision)
            ramification = _lcm(ramification, precision.denominator)
        units = {int(Fraction(e) * ramification): c for e, c in terms.items()}
        precision_units = None if precision is None else int(precision * ramification)
        return cls(units, ramification, precision_units, weight)

    @classmethod
    def constant(cls, value: Coefficient, weight: int = 0) -> "PuiseuxSeries":
        return cls({0: value}, 1, None, weight)

    @classmethod
    def one(cls) -> "PuiseuxSeries":
        return cls.constant(1)

    @classmethod
    def monomial(cls, value: Coefficient, exponent: Fraction, weight: int = 0) -> "PuiseuxSeries":
        return cls.from_exponents({Fraction(exponent): value}, None, weight)

    @classmethod
    def zero(cls, precision: Optional[Fraction] = None, weight: int = 0) -> "PuiseuxSeries":
        return cls.from_exponents({}, precision, weight)

    # -- inspection -----------------------------------------------------------

    @property
    def precision_units(self) -> Optional[int]:
        return self._precision

    @property
    def precision(self) -> Optional[Fraction]:
        """Absolute precision as a q-exponent, None when exact."""
        return None if self._precision is None else Fraction(self._precision, self.ramification)

    @property
    def valuation(self) -> Optional[Fraction]:
        """Smallest q-exponent with a nonzero coefficient, None when no term is known."""
        return Fraction(self._keys[0], self.ramification) if self._keys else None

    @property
    def relative_precision(self) -> Optional[Fraction]:
        if self.precision is None:
            return None
        if self.valuation is None:
            return Fraction(0)
        return self.precision - self.valuation

    @property
    def leading_coefficient(self) -> CyclotomicNumber:
        if not self._keys:
            raise PrecisionError("no nonzero coefficient is known")
        return self._terms[self._keys[0]]

    def is_exact(self) -> bool:
        return self._precision is None

    def is_zero(self) -> bool:
        """No nonzero coefficient below the precision."""
        return not self._keys

    def items(self) -> List[Tuple[Fraction, CyclotomicNumber]]:
        return [(Fraction(k, self.ramification), self._terms[k]) for k in self._keys]

    def coefficient(self, exponent: Fraction) -> CyclotomicNumber:
        """Coefficient of q^exponent."""
        exponent = Fraction(exponent)
        if self.precision is not None and exponent >= self.precision:
            raise PrecisionError(f"coefficient of q^{exponent} is beyond O(q^{self.precision})")
        scaled = exponent * self.ramification
        if scaled.denominator != 1:
            return CyclotomicNumber.zero()
        return self._terms.get(int(scaled), CyclotomicNumber.zero())

    def is_rational(self) -> bool:
        return all(c.is_rational() for c in self._terms.values())

    def conductor(self) -> int:
        """lcm of the conductors of the coefficients."""
        n = 1
        for c in self._terms.values():
            n = _lcm(n, c.conductor)
        return n

    def _scaled(self, ramification: int) -> Tuple[Dict[int, CyclotomicNumber], Optional[int]]:
        factor = ramification // self.ramification
        if factor == 1:
            return self._terms, self._precision
        terms = {k * factor: c for k, c in self._terms.items()}
        return terms, None if self._precision is None else self._precision * factor

    # -- arithmetic -----------------------------------------------------------

    @staticmethod
    def _lift(value) -> Optional["PuiseuxSeries"]:
        if isinstance(value, PuiseuxSeries):
            return value
        if isinstance(value, (int, Fraction, CyclotomicNumber)):
            return PuiseuxSeries.constant(value)
        return None

    def _check_weight(self, other: "PuiseuxSeries") -> None:
        if self.weight != other.weight:
            raise GradingError(f"cannot add series of two-pi weights {self.weight} and {other.weight}")

    def __add__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        if other.is_exact() and other.weight == 0 and self.weight != 0 and other.is_zero():
            return self
        self._check_weight(other)
        ramification = _lcm(self.ramification, other.ramification)
        a, pa = self._scaled(ramification)
        b, pb = other._scaled(ramification)
        precision = pa if pb is None else (pb if pa is None else min(pa, pb))
        terms = dict(a)
        for k, c in b.items():
            terms[k] = terms[k] + c if k in terms else c
        return PuiseuxSeries(terms, ramification, precision, self.weight)

    def __radd__(self, other):
        return self.__add__(other)

    def __neg__(self):
        return PuiseuxSeries({k: -c for k, c in self._terms.items()}, self.ramification,
                             self._precision, self.weight)

    def __sub__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def with_weight(self, weight: int) -> "PuiseuxSeries":
        """The same coefficients read with another two-pi weight."""
        return PuiseuxSeries(self._terms, self.ramification, self._precision, weight)

    def scale(self, value: Coefficient) -> "PuiseuxSeries":
        value = _as_coefficient(value)
        return PuiseuxSeries({k: c * value for k, c in self._terms.items()}, self.ramification,
                             self._precision, self.weight)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, CyclotomicNumber)):
            return self.scale(other)
        if not isinstance(other, PuiseuxSeries):
            return NotImplemented
        ramification = _lcm(self.ramification, other.ramification)
        a, pa = self._scaled(ramification)
        b, pb = other._scaled(ramification)
        va = min(a) if a else _bound(pa)
        vb = min(b) if b else _bound(pb)
        bound = min(_bound(pa) + vb, _bound(pb) + va)
        keys_b = sorted(b)
        product: Dict[int, CyclotomicNumber] = {}
        for ka in sorted(a):
            ca = a[ka]
            for kb in keys_b:
                k = ka + kb
                if k >= bound:
                    break
                term = ca * b[kb]
                product[k] = product[k] + term if k in product else term
        precision = None if bound == math.inf else int(bound)
        return PuiseuxSeries(product, ramification, precision, self.weight + other.weight)

    def __rmul__(self, other):
        return self.__mul__(other)

    def inverse(self, relative_precision: Optional[Fraction] = None) -> "PuiseuxSeries":
        """
        Multiplicative inverse, valuation and weight negated, relative precision kept.

        Args:
            relative_precision: required only for exact series with several terms,
                whose inverse is an infinite series

        Raises:
            PreconditionError: for the zero series
        """
        if not self._keys:
            raise PreconditionError("cannot invert a series with no known nonzero term")
        v = self._keys[0]
        inverse_lead = self._terms[v].inverse()
        if self._precision is None:
            if len(self._keys) == 1:
                return PuiseuxSeries({-v: inverse_lead}, self.ramification, None, -self.weight)
            if relative_precision is None:
                raise PrecisionError("an exact series with several terms needs a precision to invert")
            ramification = _lcm(self.ramification, Fraction(relative_precision).denominator)
            source, _ = self._scaled(ramification)
            v = min(source)
            relative = int(Fraction(relative_precision) * ramification)
        else:
            ramification = self.ramification
            source = self._terms
            relative = self._precision - v
        offsets = [(k - v, source[k]) for k in sorted(source) if k != v]
        step = 0
        for i, _ in offsets:
            step = gcd(step, i)
        inverse = {0: inverse_lead}
        if step:
            for j in range(step, relative, step):
                total = None
                for i, a_i in offsets:
                    if i > j:
                        break
                    b = inverse.get(j - i)
                    if b is None:
                        continue
                    term = a_i * b
                    total = term if total is None else total + term
                if total is not None and not total.is_zero():
                    inverse[j] = -(inverse_lead * total)
        terms = {j - v: c for j, c in inverse.items()}
        return PuiseuxSeries(terms, ramification, relative - v, -self.weight)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction, CyclotomicNumber)):
            return self.scale(_as_coefficient(other).inverse())
        if not isinstance(other, PuiseuxSeries):
            return NotImplemented
        return self * other.inverse()

    def __pow__(self, exponent: int) -> "PuiseuxSeries":
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = PuiseuxSeries.one()
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            exponent >>= 1
            if exponent:
                base = base * base
        return result

    # -- transformations ------------------------------------------------------

    def truncate(self, precision: Fraction) -> "PuiseuxSeries":
        """Forget every term at or beyond q^precision."""
        precision = Fraction(precision)
        if self.precision is not None and precision >= self.precision:
            return self
        ramification = _lcm(self.ramification, precision.denominator)
        terms, _ = self._scaled(ramification)
        return PuiseuxSeries(terms, ramification, int(precision * ramification), self.weight)

    def on_lattice(self, n: int) -> "PuiseuxSeries":
        """
        Re-express with exponents in (1/n)Z, rounding the precision down to that lattice.

        Raises:
            PreconditionError: if a stored exponent is not in (1/n)Z
        """
        terms = {}
        for e, c in self.items():
            scaled = e * n
            if scaled.denominator != 1:
                raise PreconditionError(f"exponent {e} is not in (1/{n})Z")
            terms[int(scaled)] = c
        precision = None if self.precision is None else math.floor(self.precision * n)
        return PuiseuxSeries(terms, n, precision, self.weight)

    def rescale_tau(self, k: Fraction) -> "PuiseuxSeries":
        """The series of f(k tau): every q-exponent is multiplied by the positive rational k."""
        k = Fraction(k)
        if k <= 0:
            raise PreconditionError(f"rescaling factor must be positive, got {k}")
        ramification = self.ramification * k.denominator
        terms = {e * k.numerator: c for e, c in self._terms.items()}
        precision = None if self._precision is None else self._precision * k.numerator
        return PuiseuxSeries(terms, ramification, precision, self.weight)

    def coefficients_galois(self, d: int) -> "PuiseuxSeries":
        """Apply sigma_d to every coefficient."""
        return PuiseuxSeries({k: c.galois_apply(d) for k, c in self._terms.items()}, self.ramification,
                             self._precision, self.weight)

    def constant_term_or_order(self) -> CuspLimit:
        """
        Classify the series at q = 0.

        Raises:
            GradingError: if the weight is not 0
            PrecisionError: if the constant term is outside the known window
        """
        if self.weight != 0:
            raise GradingError(f"only weight-0 series have cusp values, got weight {self.weight}")
        if self._keys and self._keys[0] < 0:
            return CuspLimit(CuspLimitKind.POLE, order=-self.valuation)
        if self._precision is not None and self._precision <= 0:
            raise PrecisionError(f"constant term is beyond O(q^{self.precision})")
        if not self._keys or self._keys[0] > 0:
            return CuspLimit(CuspLimitKind.ZERO_AT_INFINITY)
        return CuspLimit(CuspLimitKind.FINITE, value=self._terms[self._keys[0]])

    # -- comparison and output ------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, PuiseuxSeries):
            return False
        return (self.weight == other.weight and self.precision == other.precision
                and self.items() == other.items())

    def __hash__(self):
        raise TypeError("PuiseuxSeries is not hashable")

    def agrees_with(self, other: "PuiseuxSeries") -> bool:
        """True when the difference has no nonzero term inside the common window."""
        return (self - other).is_zero()

    def to_payload(self) -> SeriesPayload:
        terms = []
        for k in self._keys:
            c = self._terms[k].reduced()
            terms.append((k, c.conductor, [str(x) for x in c.coords]))
        return SeriesPayload(M=self.ramification, w=self.weight, P=self._precision, terms=terms)

    @classmethod
    def from_payload(cls, payload: Union[SeriesPayload, dict]) -> "PuiseuxSeries":
        if not isinstance(payload, SeriesPayload):
            payload = SeriesPayload.model_validate(payload)
        terms = {k: CyclotomicNumber(n, [Fraction(x) for x in coords]) for k, n, coords in payload.terms}
        return cls(terms, payload.M, payload.P, payload.w)

    def format(self, max_terms: Optional[int] = None) -> str:
        parts = []
        shown = self._keys if max_terms is None else self._keys[:max_terms]
        for k in shown:
            parts.append(_format_term(self._terms[k], Fraction(k, self.ramification)))
        if max_terms is not None and len(self._keys) > max_terms:
            parts.append("...")
        if self.precision is not None:
            parts.append(f"O({_format_power(self.precision)})")
        text = " + ".join(parts) if parts else "0"
        if self.weight:
            text = f"(2π)^({Fraction(self.weight, 2)}) * ({text})"
        return text

    def __str__(self) -> str:
        return self.format()

    def __repr__(self) -> str:
        return f"PuiseuxSeries(M={self.ramification}, w={self.weight}, P={self._precision}, terms={len(self._keys)})"


def _format_power(exponent: Fraction) -> str:
    if exponent == 0:
        return "1"
    if exponent == 1:
        return "q"
    if exponent.denominator == 1:
        return f"q^{exponent.numerator}"
    return f"q^({exponent})"


def _format_term(c: CyclotomicNumber, exponent: Fraction) -> str:
    coefficient = str(c)
    if exponent == 0:
        return coefficient
    power = _format_power(exponent)
    if coefficient == "1":
        return power
    if coefficient == "-1":
        return f"-{power}"
    if c.is_rational():
        return f"{coefficient}*{power}"
    return f"({coefficient})*{power}"

