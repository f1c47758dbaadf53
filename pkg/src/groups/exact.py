"""Exact scalars and projective arithmetic.

Dyadic rationals carry Thompson's group, plain rationals (`fractions.Fraction`)
carry Mobius data, and `ProjPoint` / `Mobius` model the rational points of the
projective line acted on by positive-determinant integer matrices.

Every type here is an immutable value kept in canonical form, so structural
equality is value equality.
"""

import functools
import logging
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple, Union

from errors import InvariantViolation, PreconditionError

logger = logging.getLogger(__name__)

Rational = Fraction

_POW2_LITERAL = re.compile(r"^\s*([+-]?\d+)\s*/\s*2\s*\^\s*(\d+)\s*$")


@functools.total_ordering
@dataclass(frozen=True)
class Dyadic:
    """The dyadic rational num / 2^exp, reduced so that exp == 0 or num is odd."""

    num: int
    exp: int = 0

    def __post_init__(self):
        if not isinstance(self.num, int) or not isinstance(self.exp, int):
            raise InvariantViolation("non-integer dyadic data", f"num={self.num!r}, exp={self.exp!r}")
        num, exp = self.num, self.exp
        if exp < 0:
            num, exp = num << -exp, 0
        if num == 0:
            exp = 0
        elif exp:
            shift = min((num & -num).bit_length() - 1, exp)
            num, exp = num >> shift, exp - shift
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "exp", exp)

    @classmethod
    def coerce(cls, value: Union["Dyadic", int, Fraction]) -> "Dyadic":
        if isinstance(value, Dyadic):
            return value
        if isinstance(value, int):
            return cls(value, 0)
        if isinstance(value, Fraction):
            return cls.from_fraction(value)
        raise TypeError(f"cannot interpret {value!r} as a dyadic rational")

    @classmethod
    def from_fraction(cls, value: Fraction) -> "Dyadic":
        den = value.denominator
        if den & (den - 1):
            raise PreconditionError(f"{value} is not a dyadic rational")
        return cls(value.numerator, den.bit_length() - 1)

    @classmethod
    def parse(cls, text: str) -> "Dyadic":
        """Parse `p/q` (q a power of two), `m/2^e` or an integer."""
        match = _POW2_LITERAL.match(text)
        if match:
            return cls(int(match.group(1)), int(match.group(2)))
        try:
            return cls.from_fraction(Fraction(text.strip()))
        except (ValueError, ZeroDivisionError) as e:
            raise PreconditionError(f"invalid dyadic literal {text!r}: {e}") from e

    def to_fraction(self) -> Fraction:
        return Fraction(self.num, 1 << self.exp)

    def scale2(self, k: int) -> "Dyadic":
        """Multiply by 2^k."""
        if k <= 0:
            return Dyadic(self.num, self.exp - k)
        if k <= self.exp:
            return Dyadic(self.num, self.exp - k)
        return Dyadic(self.num << (k - self.exp), 0)

    def floor(self) -> int:
        return self.num >> self.exp

    def ceil(self) -> int:
        return -((-self.num) >> self.exp)

    def _aligned(self, other: "Dyadic") -> Tuple[int, int, int]:
        exp = max(self.exp, other.exp)
        return self.num << (exp - self.exp), other.num << (exp - other.exp), exp

    def __add__(self, other):
        other = _as_dyadic(other)
        if other is NotImplemented:
            return other
        a, b, exp = self._aligned(other)
        return Dyadic(a + b, exp)

    __radd__ = __add__

    def __sub__(self, other):
        other = _as_dyadic(other)
        if other is NotImplemented:
            return other
        a, b, exp = self._aligned(other)
        return Dyadic(a - b, exp)

    def __rsub__(self, other):
        other = _as_dyadic(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        other = _as_dyadic(other)
        if other is NotImplemented:
            return other
        return Dyadic(self.num * other.num, self.exp + other.exp)

    __rmul__ = __mul__

    def __neg__(self):
        return Dyadic(-self.num, self.exp)

    def __abs__(self):
        return Dyadic(abs(self.num), self.exp)

    def __lt__(self, other):
        other = _as_dyadic(other)
        if other is NotImplemented:
            return other
        a, b, _ = self._aligned(other)
        return a < b

    def __bool__(self):
        return self.num != 0

    def __str__(self):
        if self.exp == 0:
            return str(self.num)
        return f"{self.num}/{1 << self.exp}"


def _as_dyadic(value):
    if isinstance(value, Dyadic):
        return value
    if isinstance(value, int):
        return Dyadic(value)
    return NotImplemented


def dyadic_arith(x: Dyadic, y: Dyadic, op: str):
    """Apply `op` in {add, sub, mul, cmp}; cmp returns -1, 0 or 1."""
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    if op == "cmp":
        return (x > y) - (x < y)
    raise PreconditionError(f"unknown dyadic operation {op!r}")


def parse_rational(text: str) -> Fraction:
    match = _POW2_LITERAL.match(text)
    if match:
        return Fraction(int(match.group(1)), 1 << int(match.group(2)))
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as e:
        raise PreconditionError(f"invalid rational literal {text!r}: {e}") from e


def format_rational(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def log2_exact(value: Fraction) -> int:
    """k with value == 2^k; raises if value is not a power of two."""
    value = Fraction(value)
    num, den = value.numerator, value.denominator
    if num <= 0 or num & (num - 1) or den & (den - 1):
        raise InvariantViolation("slope not a power of two", str(value))
    return (num.bit_length() - 1) - (den.bit_length() - 1)


def log2_floor(value: Fraction) -> int:
    """floor(log2(value)) for a positive rational, computed exactly."""
    value = Fraction(value)
    if value <= 0:
        raise PreconditionError(f"log2 of non-positive value {value}")
    k = value.numerator.bit_length() - value.denominator.bit_length()
    # value lies in [2^(k-1), 2^(k+1))
    if value < Fraction(2) ** k:
        k -= 1
    return k


def log2_ceil(value: Fraction) -> int:
    k = log2_floor(value)
    return k if Fraction(2) ** k == value else k + 1


@dataclass(frozen=True)
class ProjPoint:
    """The point [p:q] of the rational projective line, with q > 0 or [1:0] for infinity."""

    p: int
    q: int

    def __post_init__(self):
        p, q = self.p, self.q
        if not isinstance(p, int) or not isinstance(q, int):
            raise InvariantViolation("non-integer projective coordinates", f"[{p!r}:{q!r}]")
        if p == 0 and q == 0:
            raise InvariantViolation("zero projective vector", "[0:0]")
        g = math.gcd(p, q)
        p, q = p // g, q // g
        if q < 0 or (q == 0 and p < 0):
            p, q = -p, -q
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

    @classmethod
    def affine(cls, value) -> "ProjPoint":
        value = Fraction(value)
        return cls(value.numerator, value.denominator)

    @property
    def is_infinity(self) -> bool:
        return self.q == 0

    def to_fraction(self) -> Fraction:
        if self.q == 0:
            raise PreconditionError("infinity has no affine coordinate")
        return Fraction(self.p, self.q)

    def __str__(self):
        return f"[{self.p}:{self.q}]"


INFINITY = ProjPoint(1, 0)


def proj_leq(x: ProjPoint, y: ProjPoint) -> bool:
    if x.is_infinity or y.is_infinity:
        raise PreconditionError("the order on P1 is only defined away from infinity")
    return x.p * y.q <= y.p * x.q


@dataclass(frozen=True)
class Mobius:
    """A primitive integer matrix [[a, b], [c, d]] with det > 0, acting projectively."""

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        entries = (self.a, self.b, self.c, self.d)
        if not all(isinstance(v, int) for v in entries):
            raise InvariantViolation("non-integer matrix entry", str(entries))
        if self.a * self.d - self.b * self.c <= 0:
            raise InvariantViolation("non-positive determinant", str(entries))
        g = functools.reduce(math.gcd, entries)
        entries = tuple(v // g for v in entries)
        if next(v for v in entries if v) < 0:
            entries = tuple(-v for v in entries)
        for name, value in zip("abcd", entries):
            object.__setattr__(self, name, value)

    @classmethod
    def from_rationals(cls, a, b, c, d) -> "Mobius":
        values = [Fraction(v) for v in (a, b, c, d)]
        den = functools.reduce(math.lcm, (v.denominator for v in values))
        return cls(*(int(v * den) for v in values))

    @property
    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    @property
    def fixes_infinity(self) -> bool:
        return self.c == 0

    def pole(self) -> Optional[Fraction]:
        """The affine point sent to infinity, if any."""
        if self.c == 0:
            return None
        return Fraction(-self.d, self.c)

    def apply(self, x: ProjPoint) -> ProjPoint:
        return proj_apply(self, x)

    def apply_affine(self, x: Fraction) -> Fraction:
        den = self.c * x + self.d
        if den == 0:
            raise PreconditionError(f"{x} is the pole of {self}")
        return (self.a * x + self.b) / den

    def compose(self, other: "Mobius") -> "Mobius":
        return mobius_compose(self, other)

    def inverse(self) -> "Mobius":
        return mobius_inverse(self)

    def __str__(self):
        return f"[[{self.a},{self.b}],[{self.c},{self.d}]]"


IDENTITY = Mobius(1, 0, 0, 1)


def proj_apply(m: Mobius, x: ProjPoint) -> ProjPoint:
    return ProjPoint(m.a * x.p + m.b * x.q, m.c * x.p + m.d * x.q)


def mobius_compose(m1: Mobius, m2: Mobius) -> Mobius:
    """Matrix product m1 * m2, i.e. apply m2 first."""
    return Mobius(
        m1.a * m2.a + m1.b * m2.c,
        m1.a * m2.b + m1.b * m2.d,
        m1.c * m2.a + m1.d * m2.c,
        m1.c * m2.b + m1.d * m2.d,
    )


def mobius_inverse(m: Mobius) -> Mobius:
    return Mobius(m.d, -m.b, -m.c, m.a)


def point_sort_key(x):
    """Total sort key over the point types used as lamp positions and orbit points."""
    if isinstance(x, bool):
        raise TypeError("booleans are not points")
    if isinstance(x, (int, Fraction)):
        return (0, Fraction(x))
    if isinstance(x, Dyadic):
        return (0, x.to_fraction())
    if isinstance(x, ProjPoint):
        return (1, 0) if x.is_infinity else (0, x.to_fraction())
    if isinstance(x, tuple):
        return (2, tuple(point_sort_key(v) for v in x))
    if hasattr(x, "sort_key"):
        return (3, x.sort_key())
    raise TypeError(f"no sort key for {x!r}")
