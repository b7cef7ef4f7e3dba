"""Gel'fand-Zetlin basis of the unitary gl(1|n) modules W([m]_{n+1}).

A pattern is stored top-down: ``rows[0]`` is the fixed top row
``[m_{0,n+1}, m_{1,n+1}, ..., m_{n,n+1}]``, ``rows[1]`` is row ``n``
(``[m_{1n}, ..., m_{nn}]``) and ``rows[n]`` is row 1 (``[m_{11}]``).
Labels are Fractions: only differences are forced to be integers.
"""
from __future__ import annotations

import enum
import itertools
import os
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Iterable, Iterator, Sequence

from .scalars import as_rational, rational_to_str

DEFAULT_DIM_CAP = 10**6
DIM_CAP_ENV = "GL1N_DIM_CAP"


class DimensionError(ValueError):
    """Raised when a module would exceed the configured dimension cap."""


class NotUnitaryError(ValueError):
    pass


def dim_cap() -> int:
    raw = os.environ.get(DIM_CAP_ENV)
    return int(raw) if raw else DEFAULT_DIM_CAP


def _is_nonneg_int(q: Fraction) -> bool:
    return q.denominator == 1 and q >= 0


@dataclass(frozen=True)
class HighestWeight:
    n: int
    m_top: tuple[Fraction, ...]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be a positive integer")
        if len(self.m_top) != self.n + 1:
            raise ValueError(f"expected {self.n + 1} labels, got {len(self.m_top)}")
        for i in range(1, self.n):
            if not _is_nonneg_int(self.m_top[i] - self.m_top[i + 1]):
                raise ValueError(
                    f"m_{i},n+1 - m_{i + 1},n+1 must be a nonnegative integer: {self.label_str()}"
                )

    @classmethod
    def of(cls, labels: Iterable) -> "HighestWeight":
        top = tuple(as_rational(x) for x in labels)
        return cls(len(top) - 1, top)

    @classmethod
    def fock(cls, n: int, p: int) -> "HighestWeight":
        """W(p) = W([p, 0, ..., 0])."""
        return cls.of([p] + [0] * n)

    @classmethod
    def ladder(cls, n: int, p: int) -> "HighestWeight":
        """V(p) = W([1, p-1, 0, ..., 0]); needs n >= 2 and p >= 1."""
        if n < 2 or p < 1:
            raise ValueError("ladder representations need n >= 2 and p >= 1")
        return cls.of([1, p - 1] + [0] * (n - 1))

    @property
    def m0(self) -> Fraction:
        return self.m_top[0]

    def m(self, i: int) -> Fraction:
        """m_{i,n+1}."""
        return self.m_top[i]

    def label_str(self) -> str:
        return "[" + ",".join(rational_to_str(x) for x in self.m_top) + "]"


class Kind(enum.Enum):
    TYPICAL = "typical"
    ATYPICAL = "atypical"
    NOT_UNITARY = "not_unitary"


@dataclass(frozen=True)
class UnitarityClass:
    kind: Kind
    k: int | None = None

    @property
    def unitary(self) -> bool:
        return self.kind is not Kind.NOT_UNITARY

    def __str__(self) -> str:
        if self.kind is Kind.ATYPICAL:
            return f"atypical(k={self.k})"
        return self.kind.value


def classify_unitary(hw: HighestWeight) -> UnitarityClass:
    n, m = hw.n, hw.m_top
    if m[0] + m[n] - n + 1 > 0:
        return UnitarityClass(Kind.TYPICAL)
    for k in range(1, n + 1):
        if m[0] + m[k] == k - 1 and all(m[j] == m[k] for j in range(k, n + 1)):
            return UnitarityClass(Kind.ATYPICAL, k)
    return UnitarityClass(Kind.NOT_UNITARY)


def require_unitary(hw: HighestWeight) -> UnitarityClass:
    cls = classify_unitary(hw)
    if not cls.unitary:
        raise NotUnitaryError(f"W({hw.label_str()}) is not a unitary representation")
    return cls


@dataclass(frozen=True)
class GzPattern:
    rows: tuple[tuple[Fraction, ...], ...]

    @property
    def n(self) -> int:
        return len(self.rows) - 1

    @property
    def top(self) -> tuple[Fraction, ...]:
        return self.rows[0]

    def row(self, k: int) -> tuple[Fraction, ...]:
        """Row k as [m_{1k}, ..., m_{kk}] (k = 1..n), or the n+1 top labels
        [m_{0,n+1}, ..., m_{n,n+1}] for k = n+1."""
        return self.rows[self.n + 1 - k]

    def m(self, i: int, k: int) -> Fraction:
        if k == self.n + 1:
            return self.rows[0][i]
        return self.rows[self.n + 1 - k][i - 1]

    def l(self, i: int, k: int) -> Fraction:
        """Shifted label l_{ik} = m_{ik} - i."""
        return self.m(i, k) - i

    @property
    def theta(self) -> tuple[int, ...]:
        top, rn = self.rows[0], self.rows[1]
        return tuple(int(rn[i - 1] - top[i]) for i in range(1, self.n + 1))

    def shifted(self, changes: Iterable[tuple[int, int, int]]) -> "GzPattern":
        """Copy with m_{ik} += delta for each (i, k, delta); k <= n."""
        rows = [list(r) for r in self.rows]
        for i, k, delta in changes:
            rows[self.n + 1 - k][i - 1] += delta
        return GzPattern(tuple(tuple(r) for r in rows))

    def flat(self) -> tuple[Fraction, ...]:
        return tuple(itertools.chain.from_iterable(self.rows))

    def to_json(self) -> list[list[str]]:
        return [[rational_to_str(x) for x in row] for row in self.rows]

    @classmethod
    def from_json(cls, data: Sequence[Sequence]) -> "GzPattern":
        return cls(tuple(tuple(as_rational(x) for x in row) for row in data))

    def key(self) -> str:
        return "|".join(",".join(rational_to_str(x) for x in row) for row in self.rows)


def is_valid_pattern(hw: HighestWeight, pat: GzPattern) -> bool:
    """Check (GZ1)-(GZ4) directly, independent of the enumerator."""
    n = hw.n
    if len(pat.rows) != n + 1 or tuple(pat.rows[0]) != tuple(hw.m_top):
        return False
    for k in range(1, n + 1):
        if len(pat.row(k)) != k:
            return False
    m = pat.m
    # (GZ1)
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            if not _is_nonneg_int(m(i, n + 1) - m(j, n + 1)):
                return False
    # (GZ2)
    for i in range(1, n + 1):
        if m(i, n) - m(i, n + 1) not in (0, 1):
            return False
    # (GZ3)
    for k in range(1, n + 1):
        if m(0, n + 1) + m(k, n + 1) == k - 1 and m(k, n) != m(k, n + 1):
            return False
    # (GZ4)
    for j in range(1, n):
        for i in range(1, j + 1):
            if not _is_nonneg_int(m(i, j + 1) - m(i, j)):
                return False
            if not _is_nonneg_int(m(i, j) - m(i + 1, j + 1)):
                return False
    return True


def _interlacing(upper: Sequence[Fraction]) -> Iterator[tuple[Fraction, ...]]:
    """All rows r of length len(upper)-1 with upper[i] >= r[i] >= upper[i+1]."""
    ranges = []
    for i in range(len(upper) - 1):
        hi, lo = upper[i], upper[i + 1]
        if hi < lo:
            return
        ranges.append([hi - t for t in range(int(hi - lo) + 1)])
    yield from itertools.product(*ranges)


def _lower_rows(row: tuple[Fraction, ...]) -> Iterator[list[tuple[Fraction, ...]]]:
    if len(row) == 1:
        yield []
        return
    for below in _interlacing(row):
        for rest in _lower_rows(below):
            yield [below] + rest


def allowed_thetas(hw: HighestWeight) -> Iterator[tuple[int, ...]]:
    """theta vectors permitted by (GZ2)+(GZ3) alone."""
    n, m = hw.n, hw.m_top
    choices = []
    for k in range(1, n + 1):
        choices.append((0,) if m[0] + m[k] == k - 1 else (0, 1))
    yield from itertools.product(*choices)


@dataclass(frozen=True)
class BasisIndex:
    hw: HighestWeight
    patterns: tuple[GzPattern, ...]
    _ordinal: dict = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self._ordinal is None:
            object.__setattr__(self, "_ordinal", {p: i for i, p in enumerate(self.patterns)})

    def __len__(self) -> int:
        return len(self.patterns)

    def __iter__(self):
        return iter(self.patterns)

    def __getitem__(self, i: int) -> GzPattern:
        return self.patterns[i]

    def index(self, pat: GzPattern) -> int | None:
        return self._ordinal.get(pat)

    def __contains__(self, pat: GzPattern) -> bool:
        return pat in self._ordinal

    @property
    def highest(self) -> GzPattern:
        return highest_weight_pattern(self.hw)


def highest_weight_pattern(hw: HighestWeight) -> GzPattern:
    n, top = hw.n, hw.m_top
    rows = [tuple(top)] + [tuple(top[1 : k + 1]) for k in range(n, 0, -1)]
    return GzPattern(tuple(rows))


def enumerate_basis(hw: HighestWeight, cap: int | None = None) -> BasisIndex:
    """All GZ patterns of W(hw), sorted descending on the flattened labels."""
    cap = dim_cap() if cap is None else cap
    n, top = hw.n, tuple(hw.m_top)
    out: list[GzPattern] = []
    for theta in allowed_thetas(hw):
        row_n = tuple(top[i] + theta[i - 1] for i in range(1, n + 1))
        for rest in _lower_rows(row_n):
            out.append(GzPattern(tuple([top, row_n] + rest)))
            if len(out) > cap:
                raise DimensionError(f"dim W({hw.label_str()}) exceeds the cap of {cap}")
    out.sort(key=GzPattern.flat, reverse=True)
    return BasisIndex(hw, tuple(out))


def weight(pat: GzPattern) -> tuple[Fraction, ...]:
    """Eigenvalues (e_00, e_11, ..., e_nn) on the pattern."""
    n = pat.n
    w0 = pat.m(0, n + 1) - sum(pat.theta)
    ws = [w0]
    for k in range(1, n + 1):
        above = sum(pat.row(k))
        below = sum(pat.row(k - 1)) if k > 1 else 0
        ws.append(above - below)
    return tuple(ws)


def hamiltonian_energy(pat: GzPattern, beta: Sequence):
    """Stationary energy (in units of hbar) of a GZ basis vector.

    Exact when ``beta`` holds Fractions, a float otherwise.
    """
    n = pat.n
    if len(beta) != n:
        raise ValueError(f"need {n} beta values")
    total = sum(beta)
    shift = sum(pat.row(n + 1)) - sum(pat.row(n))
    energy = total * shift
    for j in range(1, n + 1):
        row_j = sum(pat.row(j))
        row_below = sum(pat.row(j - 1)) if j > 1 else 0
        energy += beta[j - 1] * (row_j - row_below)
    return energy


def gl_n_dimension(label: Sequence) -> int:
    """Weyl dimension of the gl(len(label)) irrep with that highest weight."""
    m = [as_rational(x) for x in label]
    for a, b in zip(m, m[1:]):
        if a < b:
            raise ValueError(f"label {list(label)} is not weakly decreasing")
    num, den = Fraction(1), Fraction(1)
    for i, j in itertools.combinations(range(len(m)), 2):
        num *= m[i] - m[j] + j - i
        den *= j - i
    d = num / den
    assert d.denominator == 1
    return int(d)


def fock_dimension(n: int, p: int) -> int:
    return sum(comb(n, k) for k in range(min(p, n) + 1))


def ladder_dimension(n: int, p: int) -> int:
    return comb(p + n - 1, n - 1) + comb(p + n - 2, n - 1)
