"""Exact arithmetic helpers: rational parsing/formatting and square-root surds."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from numbers import Rational

import mpmath


def to_fraction(value) -> Fraction:
    """Parse an int, Fraction or ``"p/q"`` string into a Fraction.

    Floats are rejected: weights must be given exactly.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, Rational):
        return Fraction(value.numerator, value.denominator)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational: {value!r}") from exc
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


def format_fraction(q: Fraction) -> str | int:
    """Serialize as a plain int when integral, else ``"p/q"``."""
    q = Fraction(q)
    if q.denominator == 1:
        return q.numerator
    return f"{q.numerator}/{q.denominator}"


@total_ordering
@dataclass(frozen=True)
class Surd:
    """The nonnegative real ``coef * sqrt(radicand)``.

    Used for modified-physical weights, which have the form rational/sqrt(rational).
    Ordering and equality are decided exactly by comparing squares.
    """

    coef: Fraction
    radicand: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "coef", Fraction(self.coef))
        object.__setattr__(self, "radicand", Fraction(self.radicand))
        if self.coef < 0 or self.radicand <= 0:
            raise ValueError("Surd holds nonnegative values with positive radicand")

    @classmethod
    def over_sqrt(cls, num, rad) -> "Surd":
        """``num / sqrt(rad)`` rewritten as ``(num/rad) * sqrt(rad)``."""
        rad = Fraction(rad)
        return cls(Fraction(num) / rad, rad)

    def square(self) -> Fraction:
        return self.coef * self.coef * self.radicand

    def simplify(self) -> "Surd | Fraction":
        """Return a Fraction when the radicand is a perfect rational square."""
        n, d = self.radicand.numerator, self.radicand.denominator
        rn, rd = math.isqrt(n), math.isqrt(d)
        if rn * rn == n and rd * rd == d:
            return self.coef * Fraction(rn, rd)
        return self

    def __mul__(self, other):
        if isinstance(other, Surd):
            return Surd(self.coef * other.coef, self.radicand * other.radicand)
        return Surd(self.coef * to_fraction(other), self.radicand)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Surd):
            return Surd(self.coef / (other.coef * other.radicand), self.radicand * other.radicand)
        return Surd(self.coef / to_fraction(other), self.radicand)

    def _sq(self, other) -> tuple[Fraction, Fraction]:
        if isinstance(other, Surd):
            return self.square(), other.square()
        other = to_fraction(other)
        if other < 0:
            return Fraction(1), Fraction(0)
        return self.square(), other * other

    def __eq__(self, other):
        if not isinstance(other, (Surd, int, Fraction)):
            return NotImplemented
        a, b = self._sq(other)
        return a == b

    def __lt__(self, other):
        if not isinstance(other, (Surd, int, Fraction)):
            return NotImplemented
        a, b = self._sq(other)
        return a < b

    def __hash__(self):
        return hash(self.square())

    def __float__(self):
        return float(self.coef) * math.sqrt(float(self.radicand))

    def to_mpf(self):
        return mpmath.mpf(self.coef.numerator) / self.coef.denominator * mpmath.sqrt(
            mpmath.mpf(self.radicand.numerator) / self.radicand.denominator
        )

    def __str__(self):
        if self.radicand == 1:
            return str(self.coef)
        return f"{self.coef}*sqrt({self.radicand})"


def to_mpf(value):
    """Convert an exact value (int, Fraction, Surd) to an mpmath float."""
    if isinstance(value, Surd):
        return value.to_mpf()
    if isinstance(value, Fraction):
        return mpmath.mpf(value.numerator) / value.denominator
    return mpmath.mpf(value)
