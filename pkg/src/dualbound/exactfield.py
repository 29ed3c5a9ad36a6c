"""Exact arithmetic kernels.

Provides arbitrary-precision rationals (``Rat``), the ordered field
Q(sqrt(2)) (``QSqrt2``), homogeneous bivariate polynomials over it
(``HomoPoly2``), and a thin precision-tracked wrapper around mpmath
for the floating-point side.

All values are immutable after construction.
"""

from __future__ import annotations

from contextlib import contextmanager
from typing import Iterable, Sequence

import mpmath
from mpmath import mp

try:
    from gmpy2 import mpq as Rat
except ImportError:  # pragma: no cover - gmpy2 is normally available
    from fractions import Fraction as Rat

__all__ = [
    "Rat",
    "rat",
    "QSqrt2",
    "HomoPoly2",
    "DEFAULT_PRECISION",
    "working_precision",
    "to_mpf",
    "qsqrt2_sign",
    "qsqrt2_inv",
    "homopoly_mul",
]

#: Default binary precision for all floating-point evaluation.
DEFAULT_PRECISION = 256

_RAT_ZERO = Rat(0)
_RAT_ONE = Rat(1)


def rat(p, q=None) -> Rat:
    """Build a Rat from ints, strings like ``"3/4"``, or another Rat."""
    if q is not None:
        return Rat(p, q)
    if isinstance(p, str) and "/" in p:
        num, den = p.split("/")
        return Rat(int(num), int(den))
    return Rat(p)


def _sign_rat(x) -> int:
    if x > 0:
        return 1
    if x < 0:
        return -1
    return 0


@contextmanager
def working_precision(bits: int = DEFAULT_PRECISION):
    """Context manager setting the mpmath binary precision."""
    with mp.workprec(bits):
        yield mp


def to_mpf(x, precision: int = DEFAULT_PRECISION):
    """Convert a Rat (or int) to an mpf at the given precision."""
    with mp.workprec(precision):
        if isinstance(x, int):
            return mp.mpf(x)
        return mp.mpf(int(x.numerator)) / mp.mpf(int(x.denominator))


class QSqrt2:
    """An element a + b*sqrt(2) of the ordered field Q(sqrt(2)).

    Arithmetic is exact; the ordering is decided without any floating
    point by the classical case split on the signs of a and b with the
    tie broken by comparing a^2 against 2 b^2.
    """

    __slots__ = ("a", "b")

    def __init__(self, a=0, b=0):
        object.__setattr__(self, "a", rat(a))
        object.__setattr__(self, "b", rat(b))

    def __setattr__(self, *args):
        raise AttributeError("QSqrt2 is immutable")

    # -- constructors ------------------------------------------------

    @staticmethod
    def sqrt2() -> "QSqrt2":
        return QSqrt2(0, 1)

    @staticmethod
    def from_rat(r) -> "QSqrt2":
        return QSqrt2(rat(r), 0)

    # -- structure ---------------------------------------------------

    def __repr__(self):
        return f"QSqrt2({self.a}, {self.b})"

    def __str__(self):
        if self.b == 0:
            return str(self.a)
        return f"({self.a} + {self.b}*sqrt2)"

    def __hash__(self):
        return hash((self.a, self.b))

    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.a == other.a and self.b == other.b

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def is_rational(self) -> bool:
        return self.b == 0

    # -- arithmetic --------------------------------------------------

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return QSqrt2(self.a + other.a, self.b + other.b)

    __radd__ = __add__

    def __neg__(self):
        return QSqrt2(-self.a, -self.b)

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return QSqrt2(self.a - other.a, self.b - other.b)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return QSqrt2(
            self.a * other.a + 2 * self.b * other.b,
            self.a * other.b + self.b * other.a,
        )

    __rmul__ = __mul__

    def inv(self) -> "QSqrt2":
        """Exact inverse (a - b*sqrt2) / (a^2 - 2 b^2)."""
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in Q(sqrt2)")
        norm = self.a * self.a - 2 * self.b * self.b
        return QSqrt2(self.a / norm, -self.b / norm)

    def __truediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inv()

    def __rtruediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self.inv()

    def __pow__(self, n: int):
        if n < 0:
            return self.inv() ** (-n)
        result = QSqrt2(1, 0)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- ordering ----------------------------------------------------

    def sign(self) -> int:
        sa, sb = _sign_rat(self.a), _sign_rat(self.b)
        if sb == 0:
            return sa
        if sa == 0:
            return sb
        if sa == sb:
            return sa
        # Opposite signs: compare a^2 with 2 b^2; the larger square wins.
        cmp = _sign_rat(self.a * self.a - 2 * self.b * self.b)
        if cmp == 0:
            return 0  # impossible for rational a, b not both zero
        return sa if cmp > 0 else sb

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __le__(self, other):
        return (self - other).sign() <= 0

    def __gt__(self, other):
        return (self - other).sign() > 0

    def __ge__(self, other):
        return (self - other).sign() >= 0

    def __abs__(self):
        return -self if self.sign() < 0 else self

    # -- numeric -----------------------------------------------------

    def to_mpf(self, precision: int = DEFAULT_PRECISION):
        with mp.workprec(precision):
            return to_mpf(self.a, precision) + to_mpf(self.b, precision) * mp.sqrt(2)


def _coerce(x):
    if isinstance(x, QSqrt2):
        return x
    if isinstance(x, (int, Rat)):
        return QSqrt2(rat(x), 0)
    return NotImplemented


def qsqrt2_sign(x: QSqrt2) -> int:
    """Exact sign of the real number a + b*sqrt(2)."""
    return x.sign()


def qsqrt2_inv(x: QSqrt2) -> QSqrt2:
    """Exact inverse; raises ZeroDivisionError on zero."""
    return x.inv()


class HomoPoly2:
    """Homogeneous bivariate polynomial over Q(sqrt2).

    ``coeffs[i]`` is the coefficient of x^i y^(degree - i).
    """

    __slots__ = ("degree", "coeffs")

    def __init__(self, degree: int, coeffs: Iterable):
        coeffs = tuple(c if isinstance(c, QSqrt2) else QSqrt2(rat(c), 0) for c in coeffs)
        if len(coeffs) != degree + 1:
            raise ValueError(f"need {degree + 1} coefficients, got {len(coeffs)}")
        object.__setattr__(self, "degree", degree)
        object.__setattr__(self, "coeffs", coeffs)

    def __setattr__(self, *args):
        raise AttributeError("HomoPoly2 is immutable")

    def __repr__(self):
        return f"HomoPoly2({self.degree}, {list(self.coeffs)})"

    def __eq__(self, other):
        if not isinstance(other, HomoPoly2):
            return NotImplemented
        return self.degree == other.degree and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.degree, self.coeffs))

    def __add__(self, other):
        if self.degree != other.degree:
            raise ValueError("cannot add homogeneous polynomials of different degree")
        return HomoPoly2(self.degree, [u + v for u, v in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other):
        if self.degree != other.degree:
            raise ValueError("cannot subtract homogeneous polynomials of different degree")
        return HomoPoly2(self.degree, [u - v for u, v in zip(self.coeffs, other.coeffs)])

    def scale(self, factor) -> "HomoPoly2":
        factor = factor if isinstance(factor, QSqrt2) else QSqrt2(rat(factor), 0)
        return HomoPoly2(self.degree, [factor * c for c in self.coeffs])

    def __mul__(self, other):
        if not isinstance(other, HomoPoly2):
            return self.scale(other)
        deg = self.degree + other.degree
        out = [QSqrt2(0, 0)] * (deg + 1)
        for i, ci in enumerate(self.coeffs):
            if ci.is_zero():
                continue
            for j, cj in enumerate(other.coeffs):
                if cj.is_zero():
                    continue
                out[i + j] = out[i + j] + ci * cj
        return HomoPoly2(deg, out)

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = HomoPoly2(0, [QSqrt2(1, 0)])
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)


def homopoly_mul(p: HomoPoly2, q: HomoPoly2) -> HomoPoly2:
    """Exact convolution product; degrees add."""
    return p * q


def homopoly_from_rational(degree: int, coeffs: Sequence) -> HomoPoly2:
    return HomoPoly2(degree, [QSqrt2(rat(c), 0) for c in coeffs])
