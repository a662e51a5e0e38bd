"""
Exact arithmetic: rationals, elements of cyclotomic fields and rational polynomials.

A CyclotomicNumber is a polynomial in zeta_n = e^{2 pi i/n} reduced modulo the
n-th cyclotomic polynomial, stored as a dense sympy list over QQ.  Binary
operations embed both operands into Q(zeta_lcm) lazily, so numbers of different
conductors mix freely.
"""

import logging
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from sympy import Matrix, Poly, Rational as SympyRational, cyclotomic_poly, divisors, symbols, totient
from sympy.polys.densearith import dup_add, dup_div, dup_mul, dup_mul_ground, dup_neg, dup_rem, dup_sub
from sympy.polys.densebasic import dup_strip
from sympy.polys.domains import QQ
from sympy.polys.euclidtools import dup_invert

from errors import ModularUnitsError, PreconditionError

logger = logging.getLogger(__name__)

Rational = Fraction

Scalar = Union[int, Fraction]


def _to_qq(value: Scalar):
    value = Fraction(value)
    return QQ(value.numerator, value.denominator)


def _from_qq(value) -> Fraction:
    return Fraction(int(value.numerator), int(value.denominator))


def _lcm(a: int, b: int) -> int:
    return a // gcd(a, b) * b


@lru_cache(maxsize=None)
def cyclotomic_modulus(n: int) -> Tuple:
    """Dense QQ coefficients of the n-th cyclotomic polynomial, highest degree first."""
    if n < 1:
        raise PreconditionError(f"conductor must be positive, got {n}")
    return tuple(QQ(int(c)) for c in cyclotomic_poly(n, polys=True).all_coeffs())


@lru_cache(maxsize=None)
def euler_phi(n: int) -> int:
    return int(totient(n))


def _spread(rep: List, step: int) -> List:
    """Substitute x -> x^step in a dense list."""
    if not rep or step == 1:
        return list(rep)
    degree = len(rep) - 1
    spread = [QQ(0)] * (degree * step + 1)
    for i, c in enumerate(rep):
        spread[i * step] = c
    return spread


class CyclotomicNumber:
    """
    An element of Q(zeta_n) in the power basis 1, zeta_n, ..., zeta_n^{phi(n)-1}.

    Numbers whose value is rational always carry conductor 1.
    """

    __slots__ = ("conductor", "_rep", "_reduced")

    def __init__(self, conductor: int, coords: Iterable[Scalar] = ()):
        """
        Args:
            conductor: n, the field is Q(zeta_n)
            coords: coefficients of zeta_n^k, lowest power first; any length,
                reduced modulo the n-th cyclotomic polynomial
        """
        if conductor < 1:
            raise PreconditionError(f"conductor must be positive, got {conductor}")
        rep = dup_strip([_to_qq(c) for c in reversed(list(coords))])
        self._set(conductor, rep)

    def _set(self, conductor: int, rep: List) -> None:
        rep = dup_rem(rep, list(cyclotomic_modulus(conductor)), QQ) if rep else []
        if len(rep) <= 1:
            conductor = 1
        self.conductor = conductor
        self._rep = rep
        self._reduced = None

    @classmethod
    def _from_rep(cls, conductor: int, rep: List) -> "CyclotomicNumber":
        number = cls.__new__(cls)
        number._set(conductor, dup_strip(list(rep)))
        return number

    @classmethod
    def rational(cls, value: Scalar) -> "CyclotomicNumber":
        return cls(1, [value])

    @classmethod
    def zero(cls) -> "CyclotomicNumber":
        return cls(1, [])

    @classmethod
    def one(cls) -> "CyclotomicNumber":
        return cls(1, [1])

    @classmethod
    def zeta(cls, n: int, k: int = 1) -> "CyclotomicNumber":
        """zeta_n^k."""
        return cls.root_of_unity(Fraction(k, n))

    @classmethod
    def root_of_unity(cls, t: Scalar) -> "CyclotomicNumber":
        """e^{2 pi i t} for rational t, at conductor the denominator of t."""
        t = Fraction(t) % 1
        n, k = t.denominator, t.numerator
        coords = [0] * (k + 1)
        coords[k] = 1
        return cls(n, coords)

    @classmethod
    def from_powers(cls, n: int, powers: Dict[int, Scalar]) -> "CyclotomicNumber":
        """Sum of coefficient * zeta_n^k over the given exponents."""
        coords = [Fraction(0)] * n
        for k, coefficient in powers.items():
            coords[int(k) % n] += Fraction(coefficient)
        return cls(n, coords)

    @property
    def coords(self) -> Tuple[Fraction, ...]:
        """Power-basis coordinates, lowest degree first, length phi(conductor)."""
        values = [_from_qq(c) for c in reversed(self._rep)]
        values.extend([Fraction(0)] * (euler_phi(self.conductor) - len(values)))
        return tuple(values)

    def is_zero(self) -> bool:
        return not self._rep

    def is_rational(self) -> bool:
        return len(self._rep) <= 1

    def to_rational(self) -> Fraction:
        if not self.is_rational():
            raise ModularUnitsError(f"{self} is not rational")
        return _from_qq(self._rep[0]) if self._rep else Fraction(0)

    def embed(self, n_target: int) -> "CyclotomicNumber":
        """The same number written in Q(zeta_{n_target}); the conductor must divide n_target."""
        if n_target % self.conductor:
            raise PreconditionError(
                f"conductor {self.conductor} does not divide {n_target}")
        number = CyclotomicNumber.__new__(CyclotomicNumber)
        rep = _spread(self._rep, n_target // self.conductor)
        rep = dup_rem(rep, list(cyclotomic_modulus(n_target)), QQ) if rep else []
        number.conductor = n_target
        number._rep = rep
        number._reduced = None
        return number

    def _common(self, other: "CyclotomicNumber") -> Tuple[int, List, List]:
        if self.conductor == other.conductor:
            return self.conductor, self._rep, other._rep
        n = _lcm(self.conductor, other.conductor)
        return n, self.embed(n)._rep, other.embed(n)._rep

    @staticmethod
    def _coerce(value) -> "CyclotomicNumber":
        if isinstance(value, CyclotomicNumber):
            return value
        if isinstance(value, (int, Fraction)):
            return CyclotomicNumber.rational(value)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        n, a, b = self._common(other)
        return CyclotomicNumber._from_rep(n, dup_add(a, b, QQ))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        n, a, b = self._common(other)
        return CyclotomicNumber._from_rep(n, dup_sub(a, b, QQ))

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __neg__(self):
        return CyclotomicNumber._from_rep(self.conductor, dup_neg(self._rep, QQ))

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return CyclotomicNumber._from_rep(
                self.conductor, dup_mul_ground(self._rep, _to_qq(other), QQ))
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        n, a, b = self._common(other)
        return CyclotomicNumber._from_rep(n, dup_mul(a, b, QQ))

    __rmul__ = __mul__

    def inverse(self) -> "CyclotomicNumber":
        if self.is_zero():
            raise PreconditionError("division by zero in a cyclotomic field")
        if self.is_rational():
            return CyclotomicNumber.rational(1 / self.to_rational())
        inverse = dup_invert(self._rep, list(cyclotomic_modulus(self.conductor)), QQ)
        return CyclotomicNumber._from_rep(self.conductor, inverse)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other * self.inverse()

    def __pow__(self, exponent: int) -> "CyclotomicNumber":
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result, base = CyclotomicNumber.one(), self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def __eq__(self, other) -> bool:
        other = self._coerce(other)
        if other is NotImplemented:
            return False
        _, a, b = self._common(other)
        return a == b

    def __hash__(self) -> int:
        reduced = self.reduced()
        return hash((reduced.conductor, tuple(reduced._rep)))

    def galois_apply(self, d: int) -> "CyclotomicNumber":
        """sigma_d: zeta_n -> zeta_n^d, for d coprime to the conductor."""
        n = self.conductor
        if gcd(d, n) != 1:
            raise PreconditionError(f"sigma_{d} is not defined on Q(zeta_{n})")
        rep = _spread(self._rep, d % n or 1)
        return CyclotomicNumber._from_rep(n, rep)

    def conjugates(self) -> List["CyclotomicNumber"]:
        """Distinct Galois conjugates, starting with the number itself."""
        n = self.conductor
        distinct: List[CyclotomicNumber] = []
        for d in range(1, max(n, 2)):
            if gcd(d, n) != 1:
                continue
            image = self.galois_apply(d)
            if not any(image == seen for seen in distinct):
                distinct.append(image)
        return distinct

    def _fixed_by_subgroup(self, d: int) -> bool:
        n = self.conductor
        return all(self.galois_apply(a) == self
                   for a in range(1, n) if gcd(a, n) == 1 and (a - 1) % d == 0)

    def reduced(self) -> "CyclotomicNumber":
        """The same number at the smallest conductor whose field contains it."""
        if self._reduced is not None:
            return self._reduced
        n = self.conductor
        result = self
        for d in divisors(n):
            d = int(d)
            if d == n:
                break
            if d % 4 == 2 or not self._fixed_by_subgroup(d):
                continue
            basis = [CyclotomicNumber.zeta(d, j).embed(n).coords for j in range(euler_phi(d))]
            system = Matrix([[SympyRational(basis[j][i].numerator, basis[j][i].denominator)
                              for j in range(len(basis))] for i in range(euler_phi(n))])
            target = Matrix([SympyRational(c.numerator, c.denominator) for c in self.coords])
            solution, _ = system.gauss_jordan_solve(target)
            result = CyclotomicNumber(d, [Fraction(int(x.p), int(x.q)) for x in solution])
            break
        self._reduced = result
        result._reduced = result
        return result

    def multiplicative_order(self) -> Optional[int]:
        """The order of this number if it is a root of unity, otherwise None."""
        if self.is_zero():
            return None
        bound = _lcm(2, self.conductor)
        for k in divisors(bound):
            if self ** int(k) == 1:
                return int(k)
        return None

    def to_complex(self) -> complex:
        """Numerical value under zeta_n -> e^{2 pi i/n}; for debugging only."""
        n = self.conductor
        coords = np.array([float(c) for c in self.coords])
        powers = np.exp(2j * np.pi * np.arange(len(coords)) / n)
        return complex(np.dot(coords, powers))

    def __repr__(self) -> str:
        return f"CyclotomicNumber({self.conductor}, {[str(c) for c in self.coords]})"

    def __str__(self) -> str:
        number = self.reduced()
        if number.is_rational():
            return str(number.to_rational())
        terms = []
        for k, c in enumerate(number.coords):
            if c == 0:
                continue
            power = "" if k == 0 else (f"ζ{number.conductor}" if k == 1 else f"ζ{number.conductor}^{k}")
            if not power:
                text = str(abs(c))
            elif abs(c) == 1:
                text = power
            else:
                text = f"{abs(c)}*{power}"
            terms.append(("-" if c < 0 else "+", text))
        first_sign, first_text = terms[0]
        head = ("-" if first_sign == "-" else "") + first_text
        return " ".join([head] + [f"{sign} {text}" for sign, text in terms[1:]])


class RationalPolynomial:
    """A polynomial with rational coefficients, stored lowest degree first."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence[Scalar] = ()):
        coeffs = [Fraction(c) for c in coeffs]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        self.coeffs: Tuple[Fraction, ...] = tuple(coeffs)

    @classmethod
    def x(cls) -> "RationalPolynomial":
        return cls([0, 1])

    @classmethod
    def constant(cls, value: Scalar) -> "RationalPolynomial":
        return cls([value])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading_coefficient(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def _dup(self) -> List:
        return [_to_qq(c) for c in reversed(self.coeffs)]

    @classmethod
    def _from_dup(cls, rep: List) -> "RationalPolynomial":
        return cls([_from_qq(c) for c in reversed(rep)])

    def __add__(self, other):
        other = _as_polynomial(other)
        return RationalPolynomial._from_dup(dup_add(self._dup(), other._dup(), QQ))

    __radd__ = __add__

    def __sub__(self, other):
        other = _as_polynomial(other)
        return RationalPolynomial._from_dup(dup_sub(self._dup(), other._dup(), QQ))

    def __rsub__(self, other):
        return _as_polynomial(other) - self

    def __neg__(self):
        return RationalPolynomial([-c for c in self.coeffs])

    def __mul__(self, other):
        other = _as_polynomial(other)
        return RationalPolynomial._from_dup(dup_mul(self._dup(), other._dup(), QQ))

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "RationalPolynomial":
        if exponent < 0:
            raise PreconditionError("negative power of a polynomial")
        result = RationalPolynomial([1])
        for _ in range(exponent):
            result = result * self
        return result

    def __divmod__(self, other) -> Tuple["RationalPolynomial", "RationalPolynomial"]:
        other = _as_polynomial(other)
        if other.is_zero():
            raise PreconditionError("polynomial division by zero")
        quotient, remainder = dup_div(self._dup(), other._dup(), QQ)
        return RationalPolynomial._from_dup(quotient), RationalPolynomial._from_dup(remainder)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = RationalPolynomial([other])
        if not isinstance(other, RationalPolynomial):
            return False
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __call__(self, value):
        """Horner evaluation at anything supporting ring operations with rationals."""
        if not self.coeffs:
            return 0 * value
        result = self.coeffs[-1] + 0 * value
        for c in reversed(self.coeffs[:-1]):
            result = result * value + c
        return result

    def monic(self) -> "RationalPolynomial":
        lead = self.leading_coefficient
        return RationalPolynomial([c / lead for c in self.coeffs])

    def is_irreducible(self) -> bool:
        return self.degree >= 1 and Poly(list(reversed(self.coeffs)), symbols("x"), domain="QQ").is_irreducible

    def sort_key(self) -> Tuple:
        return (self.degree, tuple(reversed(self.coeffs)))

    def __repr__(self) -> str:
        return f"RationalPolynomial({[str(c) for c in self.coeffs]})"

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        return str(Poly(list(reversed(self.coeffs)), symbols("x"), domain="QQ").as_expr())


def _as_polynomial(value) -> RationalPolynomial:
    if isinstance(value, RationalPolynomial):
        return value
    if isinstance(value, (int, Fraction)):
        return RationalPolynomial([value])
    raise TypeError(f"cannot use {type(value).__name__} as a rational polynomial")


def minimal_polynomial(c: Union[CyclotomicNumber, Scalar]) -> RationalPolynomial:
    """
    Minimal polynomial of c over Q: the product of (x - c') over the distinct conjugates.

    Raises:
        ModularUnitsError: if the conjugate product is not rational
    """
    c = CyclotomicNumber._coerce(c)
    product: List[CyclotomicNumber] = [CyclotomicNumber.one()]
    for conjugate in c.conjugates():
        shifted = [CyclotomicNumber.zero()] + product
        for i, coefficient in enumerate(product):
            shifted[i] = shifted[i] - conjugate * coefficient
        product = shifted
    if not all(coefficient.is_rational() for coefficient in product):
        raise ModularUnitsError(f"conjugate product of {c} is not rational")
    polynomial = RationalPolynomial([coefficient.to_rational() for coefficient in product])
    logger.debug("minimal polynomial of %s is %s", c, polynomial)
    return polynomial


def galois_apply(d: int, c: CyclotomicNumber) -> CyclotomicNumber:
    return c.galois_apply(d)


def embed(c: CyclotomicNumber, n_target: int) -> CyclotomicNumber:
    return c.embed(n_target)
