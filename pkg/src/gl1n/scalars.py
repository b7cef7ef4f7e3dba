"""Exact scalars for GZ matrix elements.

Every matrix element produced by the GZ formulas has the shape
``sign * sqrt(q)`` with ``q`` a nonnegative rational; :class:`SurdScalar`
holds exactly that.  Products stay in the class, sums do not.  When sums
are unavoidable (brackets of generator matrices) we use :class:`SurdSum`,
a finite linear combination of ``sqrt(f)`` for squarefree integers ``f``
with rational coefficients.  Those square roots are linearly independent
over the rationals, so the representation is canonical and equality is
exact.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Union

from sympy import factorint

Rational = Fraction
Number = Union[int, Fraction]


def as_rational(x) -> Fraction:
    """Parse ints, Fractions and strings like ``"3/2"`` into a Fraction.

    Floats are accepted only if they are exactly representable as short
    decimals (``0.25`` -> ``1/4``).
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a label")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ValueError(f"non-finite label {x!r}")
        return Fraction(str(x))
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot interpret {x!r} as a rational")


def rational_to_str(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


@lru_cache(maxsize=1 << 16)
def squarefree_split(k: int) -> tuple[int, int]:
    """Return ``(s, f)`` with ``k == s*s*f`` and ``f`` squarefree (k > 0)."""
    s, f = 1, 1
    for prime, exp in factorint(k).items():
        s *= prime ** (exp // 2)
        if exp % 2:
            f *= prime
    return s, f


@dataclass(frozen=True)
class SurdScalar:
    """The real number ``sign * sqrt(radicand)``."""

    sign: int
    radicand: Fraction

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ValueError(f"sign must be -1, 0 or 1, got {self.sign}")
        if self.radicand < 0:
            raise ValueError(f"negative radicand {self.radicand}")
        if (self.sign == 0) != (self.radicand == 0):
            raise ValueError("sign is zero iff radicand is zero")

    @classmethod
    def of(cls, sign: int, radicand: Number) -> "SurdScalar":
        radicand = Fraction(radicand)
        if radicand == 0 or sign == 0:
            return ZERO_SURD
        return cls(1 if sign > 0 else -1, radicand)

    @classmethod
    def from_rational(cls, q: Number) -> "SurdScalar":
        q = Fraction(q)
        return cls.of((q > 0) - (q < 0), q * q)

    def __mul__(self, other: "SurdScalar") -> "SurdScalar":
        return surd_mul(self, other)

    def __neg__(self) -> "SurdScalar":
        return SurdScalar(-self.sign, self.radicand)

    def __float__(self) -> float:
        return surd_to_float(self)

    def __bool__(self) -> bool:
        return self.sign != 0

    def to_sum(self) -> "SurdSum":
        return SurdSum.from_surd(self)


ZERO_SURD = SurdScalar(0, Fraction(0))
ONE_SURD = SurdScalar(1, Fraction(1))


def surd_mul(a: SurdScalar, b: SurdScalar) -> SurdScalar:
    return SurdScalar.of(a.sign * b.sign, a.radicand * b.radicand)


def surd_to_float(a: SurdScalar) -> float:
    if a.sign == 0:
        return 0.0
    num, den = a.radicand.numerator, a.radicand.denominator
    if num.bit_length() < 1000 and den.bit_length() < 1000:
        return a.sign * math.sqrt(num) / math.sqrt(den)
    # pull out a power of 4 so the float conversion cannot overflow
    t = (num.bit_length() - den.bit_length()) // 2
    r = Fraction(num, den << (2 * t)) if t >= 0 else Fraction(num << (-2 * t), den)
    return a.sign * math.ldexp(math.sqrt(float(r)), t)


def surd_square_equal(a: SurdScalar, b: SurdScalar) -> bool:
    return a.sign == b.sign and a.radicand == b.radicand


class SurdSum:
    """Exact element of Q(sqrt 2, sqrt 3, sqrt 5, ...), stored as ``{f: c}``
    meaning ``sum c * sqrt(f)`` over squarefree ``f``."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict[int, Fraction] | None = None):
        self.terms = {f: c for f, c in (terms or {}).items() if c != 0}

    @classmethod
    def from_surd(cls, a: SurdScalar) -> "SurdSum":
        if a.sign == 0:
            return cls()
        p, q = a.radicand.numerator, a.radicand.denominator
        # sqrt(p/q) = sqrt(p*q)/q
        s, f = squarefree_split(p * q)
        return cls({f: Fraction(a.sign * s, q)})

    @classmethod
    def from_rational(cls, q: Number) -> "SurdSum":
        return cls({1: Fraction(q)})

    def __add__(self, other: "SurdSum") -> "SurdSum":
        out = dict(self.terms)
        for f, c in other.terms.items():
            out[f] = out.get(f, 0) + c
        return SurdSum(out)

    def __sub__(self, other: "SurdSum") -> "SurdSum":
        return self + (-other)

    def __neg__(self) -> "SurdSum":
        return SurdSum({f: -c for f, c in self.terms.items()})

    def __mul__(self, other: "SurdSum") -> "SurdSum":
        out: dict[int, Fraction] = {}
        for f1, c1 in self.terms.items():
            for f2, c2 in other.terms.items():
                g = math.gcd(f1, f2)
                # sqrt(f1)*sqrt(f2) = g*sqrt(f1*f2/g^2), and f1*f2/g^2 is squarefree
                f = (f1 // g) * (f2 // g)
                out[f] = out.get(f, 0) + c1 * c2 * g
        return SurdSum(out)

    def scale(self, q: Number) -> "SurdSum":
        return SurdSum({f: c * q for f, c in self.terms.items()})

    def __eq__(self, other) -> bool:
        if isinstance(other, SurdScalar):
            other = SurdSum.from_surd(other)
        if not isinstance(other, SurdSum):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __float__(self) -> float:
        return sum(float(c) * math.sqrt(f) for f, c in self.terms.items())

    def __repr__(self) -> str:
        if not self.terms:
            return "SurdSum(0)"
        parts = [f"{c}*sqrt({f})" if f != 1 else f"{c}" for f, c in sorted(self.terms.items())]
        return "SurdSum(" + " + ".join(parts) + ")"

    def as_surd(self) -> SurdScalar | None:
        """The single-surd form, or None if this is a genuine sum."""
        if not self.terms:
            return ZERO_SURD
        if len(self.terms) > 1:
            return None
        (f, c), = self.terms.items()
        return SurdScalar.of((c > 0) - (c < 0), c * c * f)
