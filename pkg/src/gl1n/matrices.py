"""Matrices of the gl(1|n) basis elements e_ij on the GZ basis.

Diagonal, adjacent even and odd elements come straight from the closed-form
GZ actions; the remaining even elements are built as brackets of adjacent
ones.  Exact matrices hold :class:`SurdScalar` entries (single surds) or
:class:`SurdSum` entries (after brackets).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .gz import BasisIndex, GzPattern, HighestWeight, enumerate_basis, require_unitary
from .scalars import SurdScalar, SurdSum


class TranscriptionError(RuntimeError):
    """A GZ-valid target produced an impossible matrix element."""


def parity(i: int, j: int) -> int:
    """1 for the odd elements e_0j, e_j0 (j >= 1), else 0."""
    return int((i == 0) != (j == 0))


@dataclass
class GeneratorMatrix:
    """Sparse matrix over a fixed basis ordering; ``entries[(row, col)]``."""

    size: int
    entries: dict[tuple[int, int], object] = field(default_factory=dict)
    element: tuple[int, int] | None = None
    exact: bool = True

    @property
    def parity(self) -> int | None:
        return None if self.element is None else parity(*self.element)

    def nnz(self) -> int:
        return len(self.entries)

    def to_sparse(self) -> sp.csc_matrix:
        if not self.entries:
            return sp.csc_matrix((self.size, self.size), dtype=complex)
        rows, cols, vals = [], [], []
        for (r, c), v in self.entries.items():
            rows.append(r)
            cols.append(c)
            vals.append(complex(float(v)) if self.exact else complex(v))
        return sp.csc_matrix((vals, (rows, cols)), shape=(self.size, self.size), dtype=complex)

    def to_dense(self) -> np.ndarray:
        return self.to_sparse().toarray()

    def dagger(self) -> "GeneratorMatrix":
        # exact entries are real
        if self.exact:
            ent = {(c, r): v for (r, c), v in self.entries.items()}
        else:
            ent = {(c, r): complex(v).conjugate() for (r, c), v in self.entries.items()}
        el = None if self.element is None else self.element[::-1]
        return GeneratorMatrix(self.size, ent, el, self.exact)

    def as_sums(self) -> dict[tuple[int, int], SurdSum]:
        if not self.exact:
            raise TypeError("matrix is not exact")
        out = {}
        for key, v in self.entries.items():
            s = v if isinstance(v, SurdSum) else SurdSum.from_surd(v)
            if s:
                out[key] = s
        return out

    def exact_equal(self, other: "GeneratorMatrix") -> bool:
        return self.as_sums() == other.as_sums()

    def max_abs_diff(self, other: "GeneratorMatrix") -> float:
        d = self.to_sparse() - other.to_sparse()
        return float(abs(d).max()) if d.nnz else 0.0


def _column_dict(m: GeneratorMatrix) -> dict[int, dict[int, SurdSum]]:
    cols: dict[int, dict[int, SurdSum]] = {}
    for (r, c), v in m.as_sums().items():
        cols.setdefault(c, {})[r] = v
    return cols


def exact_product(a: GeneratorMatrix, b: GeneratorMatrix) -> dict[tuple[int, int], SurdSum]:
    acols, bcols = _column_dict(a), _column_dict(b)
    out: dict[tuple[int, int], SurdSum] = {}
    for c, bcol in bcols.items():
        for k, bv in bcol.items():
            for r, av in acols.get(k, {}).items():
                key = (r, c)
                out[key] = out[key] + av * bv if key in out else av * bv
    return {k: v for k, v in out.items() if v}


def exact_combination(terms: Iterable[tuple[int, dict[tuple[int, int], SurdSum]]]) -> dict:
    out: dict[tuple[int, int], SurdSum] = {}
    for coef, ent in terms:
        for key, v in ent.items():
            add = v.scale(coef)
            out[key] = out[key] + add if key in out else add
    return {k: v for k, v in out.items() if v}


def graded_commutator(a: GeneratorMatrix, b: GeneratorMatrix, element=None) -> GeneratorMatrix:
    """a*b - (-1)^{|a||b|} b*a, exact when both inputs are exact."""
    sign = -1 if (a.parity == 1 and b.parity == 1) else 1
    if a.exact and b.exact:
        ent = exact_combination([(1, exact_product(a, b)), (-sign, exact_product(b, a))])
        return GeneratorMatrix(a.size, ent, element, True)
    sa, sb = a.to_sparse(), b.to_sparse()
    return from_sparse(sa @ sb - sign * (sb @ sa), element)


def from_sparse(m, element=None, tol: float = 0.0) -> GeneratorMatrix:
    coo = sp.coo_matrix(m)
    ent = {
        (int(r), int(c)): complex(v)
        for r, c, v in zip(coo.row, coo.col, coo.data)
        if abs(v) > tol
    }
    return GeneratorMatrix(coo.shape[0], ent, element, False)


# ---------------------------------------------------------------- diagonal


def diagonal_action(k: int, pat: GzPattern) -> Fraction:
    n = pat.n
    if k == 0:
        return pat.m(0, n + 1) - sum(pat.theta)
    if not 1 <= k <= n:
        raise ValueError(f"k out of range: {k}")
    below = sum(pat.row(k - 1)) if k > 1 else 0
    return sum(pat.row(k)) - below


def diagonal_matrix(k: int, basis: BasisIndex) -> GeneratorMatrix:
    ent = {}
    for idx, pat in enumerate(basis):
        v = diagonal_action(k, pat)
        if v:
            ent[(idx, idx)] = SurdScalar.from_rational(v)
    return GeneratorMatrix(len(basis), ent, (k, k), True)


# ------------------------------------------------------------ adjacent even


def _prod(values: Iterable[Fraction]) -> Fraction:
    out = Fraction(1)
    for v in values:
        out *= v
    return out


def _radicand_to_surd(sign: int, radicand: Fraction, context: str) -> SurdScalar:
    if radicand < 0:
        raise TranscriptionError(f"negative radicand {radicand} for {context}")
    return SurdScalar.of(sign, radicand)


def _even_element(pat: GzPattern, k: int, j: int, raise_: bool) -> Fraction:
    """Radicand of the e_{k-1,k} (raise) / e_{k,k-1} (lower) element moving m_{j,k-1}."""
    l = pat.l
    ljk1 = l(j, k - 1)
    if raise_:
        num = _prod(l(i, k) - ljk1 for i in range(1, k + 1))
        num *= _prod(l(i, k - 2) - ljk1 - 1 for i in range(1, k - 1))
        den = _prod(
            (l(i, k - 1) - ljk1) * (l(i, k - 1) - ljk1 - 1) for i in range(1, k) if i != j
        )
    else:
        num = _prod(l(i, k) - ljk1 + 1 for i in range(1, k + 1))
        num *= _prod(l(i, k - 2) - ljk1 for i in range(1, k - 1))
        den = _prod(
            (l(i, k - 1) - ljk1) * (l(i, k - 1) - ljk1 + 1) for i in range(1, k) if i != j
        )
    if den == 0:
        raise TranscriptionError(f"zero denominator at k={k}, j={j}")
    return -num / den


def raise_lower_even(k: int, direction: str, basis: BasisIndex) -> GeneratorMatrix:
    """e_{k-1,k} (direction 'raise') or e_{k,k-1} ('lower'), 2 <= k <= n."""
    n = basis.hw.n
    if not 2 <= k <= n:
        raise ValueError(f"k must lie in 2..{n}")
    if direction not in ("raise", "lower"):
        raise ValueError("direction must be 'raise' or 'lower'")
    up = direction == "raise"
    delta = 1 if up else -1
    ent = {}
    for col, pat in enumerate(basis):
        for j in range(1, k):
            target = pat.shifted([(j, k - 1, delta)])
            row = basis.index(target)
            if row is None:
                continue
            rad = _even_element(pat, k, j, up)
            s = _radicand_to_surd(1, rad, f"e_{{{k - 1 if up else k},{k if up else k - 1}}}")
            if s:
                ent[(row, col)] = s
    el = (k - 1, k) if up else (k, k - 1)
    return GeneratorMatrix(len(basis), ent, el, True)


# ---------------------------------------------------------------------- odd


def _odd_term(pat: GzPattern, j: int, path: Sequence[int], create: bool) -> tuple[int, Fraction]:
    """Sign and radicand of one term of e_0j (create=False) or e_j0 (create=True).

    ``path[r - j]`` is i_r for r = j..n.
    """
    n = pat.n
    l = pat.l
    theta = pat.theta
    i_of = {r: path[r - j] for r in range(j, n + 1)}
    i_n = i_of[n]
    sign = -1 if sum(theta[: i_n - 1]) % 2 else 1
    radicands = [l(i_n, n + 1) + l(0, n + 1) + 1]
    for r in range(j + 1, n + 1):
        ir, ir1 = i_of[r], i_of[r - 1]
        if ir > ir1:
            sign = -sign
        if create:
            num = _prod(l(k, r - 1) - l(ir, r) - 1 for k in range(1, r) if k != ir1)
            num *= _prod(l(k, r) - l(ir1, r - 1) for k in range(1, r + 1) if k != ir)
            den = _prod(l(k, r) - l(ir, r) for k in range(1, r + 1) if k != ir)
            den *= _prod(l(k, r - 1) - l(ir1, r - 1) - 1 for k in range(1, r) if k != ir1)
        else:
            num = _prod(l(k, r - 1) - l(ir, r) for k in range(1, r) if k != ir1)
            num *= _prod(l(k, r) - l(ir1, r - 1) + 1 for k in range(1, r + 1) if k != ir)
            den = _prod(l(k, r) - l(ir, r) for k in range(1, r + 1) if k != ir)
            den *= _prod(l(k, r - 1) - l(ir1, r - 1) + 1 for k in range(1, r) if k != ir1)
        radicands.append(Fraction(num) / den)
    radicands.append(
        _prod((l(k, n) - l(i_n, n)) / (l(k, n + 1) - l(i_n, n + 1)) for k in range(1, n + 1) if k != i_n)
    )
    ij = i_of[j]
    shift = -1 if create else 0
    num = _prod(l(k, j - 1) - l(ij, j) + shift for k in range(1, j))
    den = _prod(l(k, j) - l(ij, j) for k in range(1, j + 1) if k != ij)
    radicands.append(Fraction(num) / den)
    return sign, radicands


def _combine_radicands(sign: int, radicands: list[Fraction], context: str) -> SurdScalar:
    total = Fraction(1)
    for x in radicands:
        if x < 0:
            raise TranscriptionError(f"negative factor {x} in {context}")
        total *= x
    return SurdScalar.of(sign, total)


def odd_action(j: int, direction: str, basis: BasisIndex) -> GeneratorMatrix:
    """e_0j (direction 'e0j') or e_j0 ('ej0') from the nested-sum GZ formulas."""
    n = basis.hw.n
    if not 1 <= j <= n:
        raise ValueError(f"j must lie in 1..{n}")
    if direction not in ("e0j", "ej0"):
        raise ValueError("direction must be 'e0j' or 'ej0'")
    create = direction == "ej0"
    delta = 1 if create else -1
    ent = {}
    ranges = [range(1, r + 1) for r in range(j, n + 1)]
    for col, pat in enumerate(basis):
        theta = pat.theta
        for path in itertools.product(*ranges):
            i_n = path[-1]
            if (theta[i_n - 1] == 1) == create:
                continue
            target = pat.shifted([(path[r - j], r, delta) for r in range(j, n + 1)])
            row = basis.index(target)
            if row is None:
                continue
            sign, rads = _odd_term(pat, j, path, create)
            val = _combine_radicands(sign, rads, f"{direction} j={j}")
            if val:
                ent[(row, col)] = val
    el = (j, 0) if create else (0, j)
    return GeneratorMatrix(len(basis), ent, el, True)


# --------------------------------------------------------------- any e_ij


def element_matrix(i: int, j: int, basis: BasisIndex, cache: dict | None = None) -> GeneratorMatrix:
    """Exact matrix of e_ij; non-adjacent even elements come from brackets."""
    n = basis.hw.n
    if not (0 <= i <= n and 0 <= j <= n):
        raise ValueError(f"(i, j) = ({i}, {j}) out of range for n = {n}")
    if cache is not None and (i, j) in cache:
        return cache[(i, j)]
    if i == j:
        m = diagonal_matrix(i, basis)
    elif i == 0:
        m = odd_action(j, "e0j", basis)
    elif j == 0:
        m = odd_action(i, "ej0", basis)
    elif j == i + 1:
        m = raise_lower_even(j, "raise", basis)
    elif i == j + 1:
        m = raise_lower_even(i, "lower", basis)
    elif i < j:
        m = graded_commutator(
            element_matrix(i, j - 1, basis, cache), element_matrix(j - 1, j, basis, cache), (i, j)
        )
    else:
        m = graded_commutator(
            element_matrix(i, i - 1, basis, cache), element_matrix(i - 1, j, basis, cache), (i, j)
        )
    if cache is not None:
        cache[(i, j)] = m
    return m


class Representation:
    """A unitary module W(hw) with its GZ basis and cached generator matrices."""

    def __init__(self, hw: HighestWeight, basis: BasisIndex | None = None):
        self.unitarity = require_unitary(hw)
        self.hw = hw
        self.n = hw.n
        self.basis = basis if basis is not None else enumerate_basis(hw)
        self._exact: dict = {}
        self._float: dict = {}

    @property
    def dim(self) -> int:
        return len(self.basis)

    def e(self, i: int, j: int) -> GeneratorMatrix:
        return element_matrix(i, j, self.basis, self._exact)

    def ef(self, i: int, j: int) -> sp.csc_matrix:
        """Complex sparse matrix of e_ij."""
        if (i, j) not in self._float:
            self._float[(i, j)] = self.e(i, j).to_sparse()
        return self._float[(i, j)]

    @cached_property
    def identity(self) -> sp.csc_matrix:
        return sp.identity(self.dim, dtype=complex, format="csc")


def assemble_odd(alpha: Sequence[complex], basis_or_rep) -> GeneratorMatrix:
    """Sum_j alpha_j e_0j + conj(alpha_j) e_j0 as a complex matrix."""
    rep = basis_or_rep if isinstance(basis_or_rep, Representation) else Representation(basis_or_rep.hw, basis_or_rep)
    return from_sparse(odd_sparse(alpha, rep))


def odd_sparse(alpha: Sequence[complex], rep: Representation) -> sp.csc_matrix:
    if len(alpha) != rep.n:
        raise ValueError(f"need {rep.n} coefficients, got {len(alpha)}")
    out = sp.csc_matrix((rep.dim, rep.dim), dtype=complex)
    for j, a in enumerate(alpha, start=1):
        a = complex(a)
        if a != 0:
            out = out + a * rep.ef(0, j) + a.conjugate() * rep.ef(j, 0)
    return out.tocsc()


# ------------------------------------------------------------------- export


def export_coo(m: GeneratorMatrix) -> str:
    """One ``row col re im`` line per nonzero entry, 17 significant digits."""
    lines = []
    for (r, c), v in sorted(m.entries.items()):
        z = complex(float(v)) if m.exact else complex(v)
        lines.append(f"{r} {c} {z.real:.17g} {z.imag:.17g}")
    return "\n".join(lines) + ("\n" if lines else "")


def export_exact(m: GeneratorMatrix) -> str:
    """One ``row col sign num den`` line per entry: sign*sqrt(num/den)."""
    if not m.exact:
        raise TypeError("matrix is not exact")
    lines = []
    for (r, c), v in sorted(m.entries.items()):
        s = v if isinstance(v, SurdScalar) else v.as_surd()
        if s is None:
            raise ValueError(f"entry ({r}, {c}) is a sum of surds")
        if s:
            lines.append(f"{r} {c} {s.sign} {s.radicand.numerator} {s.radicand.denominator}")
    return "\n".join(lines) + ("\n" if lines else "")


def parse_exact(text: str, size: int, element=None) -> GeneratorMatrix:
    ent = {}
    for line in text.splitlines():
        if not line.strip():
            continue
        r, c, s, num, den = (int(x) for x in line.split())
        ent[(r, c)] = SurdScalar.of(s, Fraction(num, den))
    return GeneratorMatrix(size, ent, element, True)
