"""
Exact arithmetic in the golden field Q(tau), tau = (1 + sqrt 5) / 2.

Chain coordinates live in the ring Z[tau] (integer coefficients); query points
such as (3 tau + 1) i / 2 and exact rotation numbers need rational coefficients,
so both are supported by the same class.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache, total_ordering
from numbers import Integral, Rational
from typing import Tuple, Union

TAU_FLOAT = (1.0 + math.sqrt(5.0)) / 2.0

Number = Union[int, float, Fraction, "GoldenNumber"]


def _normalize(x) -> Union[int, Fraction]:
    if isinstance(x, bool):
        return int(x)
    if isinstance(x, int):
        return x
    if isinstance(x, Integral):
        return int(x)
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else x
    if isinstance(x, Rational):
        return _normalize(Fraction(x.numerator, x.denominator))
    raise TypeError(f"GoldenNumber coefficients must be rational, got {type(x).__name__}")


def golden_sign(a, b) -> int:
    """Sign of a + b*tau for rational a, b, decided without floats."""
    # a + b*tau = (s + b*sqrt5) / 2 with s = 2a + b
    s = 2 * a + b
    if s >= 0 and b >= 0:
        return 0 if (s == 0 and b == 0) else 1
    if s <= 0 and b <= 0:
        return -1
    diff = s * s - 5 * b * b
    if s > 0:
        return 1 if diff > 0 else -1
    return 1 if diff < 0 else -1


@total_ordering
class GoldenNumber:
    """Exact element a + b*tau of Q(tau)."""

    __slots__ = ("_a", "_b")

    def __init__(self, a=0, b=0) -> None:
        self._a = _normalize(a)
        self._b = _normalize(b)

    @property
    def a(self):
        return self._a

    @property
    def b(self):
        return self._b

    @property
    def coef(self) -> Tuple:
        return (self._a, self._b)

    @property
    def is_integral(self) -> bool:
        """True when the number lies in Z[tau]."""
        return isinstance(self._a, int) and isinstance(self._b, int)

    @classmethod
    def coerce(cls, x: Number) -> GoldenNumber:
        """Convert an int, Fraction, float or GoldenNumber exactly."""
        if isinstance(x, GoldenNumber):
            return x
        if isinstance(x, float):
            if not math.isfinite(x):
                raise ValueError(f"Cannot represent non-finite value {x!r}")
            return cls(Fraction(x), 0)
        if isinstance(x, (int, Rational)):
            return cls(x, 0)
        if hasattr(x, "__float__"):
            return cls.coerce(float(x))
        raise TypeError(f"Cannot convert {type(x).__name__} to GoldenNumber")

    def __repr__(self) -> str:
        return f"GoldenNumber({self._a}, {self._b})"

    def __str__(self) -> str:
        if self._b == 0:
            return f"{self._a}"
        if self._a == 0:
            return f"{self._b}τ"
        sign = "-" if self._b < 0 else "+"
        return f"{self._a}{sign}{abs(self._b)}τ"

    def __float__(self) -> float:
        return float(self._a) + float(self._b) * TAU_FLOAT

    def __hash__(self) -> int:
        return hash((self._a, self._b))

    def __bool__(self) -> bool:
        return self._a != 0 or self._b != 0

    def sign(self) -> int:
        return golden_sign(self._a, self._b)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, GoldenNumber):
            return self._a == other._a and self._b == other._b
        if isinstance(other, (int, float, Rational)):
            try:
                other = GoldenNumber.coerce(other)
            except ValueError:
                return False
            return self == other
        return NotImplemented

    def __lt__(self, other: Number) -> bool:
        try:
            other = GoldenNumber.coerce(other)
        except TypeError:
            return NotImplemented
        return golden_sign(self._a - other._a, self._b - other._b) < 0

    def __add__(self, other: Number) -> GoldenNumber:
        try:
            other = GoldenNumber.coerce(other)
        except TypeError:
            return NotImplemented
        return GoldenNumber(self._a + other._a, self._b + other._b)

    def __radd__(self, other: Number) -> GoldenNumber:
        return self + other

    def __neg__(self) -> GoldenNumber:
        return GoldenNumber(-self._a, -self._b)

    def __sub__(self, other: Number) -> GoldenNumber:
        try:
            other = GoldenNumber.coerce(other)
        except TypeError:
            return NotImplemented
        return GoldenNumber(self._a - other._a, self._b - other._b)

    def __rsub__(self, other: Number) -> GoldenNumber:
        return (-self) + other

    def __mul__(self, other: Number) -> GoldenNumber:
        try:
            other = GoldenNumber.coerce(other)
        except TypeError:
            return NotImplemented
        # tau^2 = tau + 1
        a, b, c, d = self._a, self._b, other._a, other._b
        return GoldenNumber(a * c + b * d, a * d + b * c + b * d)

    def __rmul__(self, other: Number) -> GoldenNumber:
        return self * other

    def conjugate(self) -> GoldenNumber:
        """Galois conjugate: tau -> 1 - tau."""
        return GoldenNumber(self._a + self._b, -self._b)

    def norm(self):
        """Field norm a^2 + ab - b^2."""
        return self._a * self._a + self._a * self._b - self._b * self._b

    def inverse(self) -> GoldenNumber:
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("GoldenNumber division by zero")
        c = self.conjugate()
        return GoldenNumber(Fraction(c.a) / n, Fraction(c.b) / n)

    def __truediv__(self, other: Number) -> GoldenNumber:
        try:
            other = GoldenNumber.coerce(other)
        except TypeError:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other: Number) -> GoldenNumber:
        return GoldenNumber.coerce(other) * self.inverse()

    def __pow__(self, n: int) -> GoldenNumber:
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result = ONE
        base = self
        while n > 0:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def to_json(self) -> dict:
        """Serialise as an exact coefficient pair plus a decimal approximation."""
        def enc(x):
            return x if isinstance(x, int) else f"{x.numerator}/{x.denominator}"
        return {"a": enc(self._a), "b": enc(self._b), "approx": float(self)}


ZERO = GoldenNumber(0, 0)
ONE = GoldenNumber(1, 0)
TAU = GoldenNumber(0, 1)
SQRT5 = GoldenNumber(-1, 2)
DEFAULT_THETA = GoldenNumber(Fraction(1, 2), Fraction(3, 2))


@lru_cache(maxsize=None)
def tau_power(n: int) -> GoldenNumber:
    """tau**n for any integer n; tau**-1 = tau - 1."""
    if n >= 0:
        return TAU ** n
    return GoldenNumber(-1, 1) ** (-n)
