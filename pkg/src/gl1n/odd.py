"""Eigenvalues and eigenvectors of self-adjoint odd elements of gl(1|n).

The odd element ``sum_j alpha_j e_0j + conj(alpha_j) e_j0`` is rewritten as
``|alpha| (E_0n + E_n0)`` in a rotated basis ``E_ij``.  Its spectrum then
follows from the branching gl(1|n) -> gl(1|1) + gl(n-1), and eigenvectors
come from the gl(1|1) doublets ``(v, w)`` of the rotated GZ structure.
"""
from __future__ import annotations

import itertools
import math
import warnings
from collections import Counter, defaultdict
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Sequence

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp

from .gz import (
    BasisIndex,
    GzPattern,
    HighestWeight,
    Kind,
    highest_weight_pattern,
    gl_n_dimension,
    require_unitary,
    weight,
)
from .matrices import Representation, odd_sparse

HW_RESIDUAL_TOL = 1e-8


class EigenvectorFallbackWarning(RuntimeWarning):
    pass


# ------------------------------------------------------------------ rotation


@dataclass(frozen=True)
class RotationU:
    """Unitary Hessenberg matrix whose last row is conj(alpha)/|alpha|."""

    U: np.ndarray
    norm: float

    @property
    def n(self) -> int:
        return self.U.shape[0]

    @property
    def coefficients(self) -> np.ndarray:
        return self.U[-1]


def build_rotation(alpha: Sequence[complex]) -> RotationU:
    a = np.asarray(alpha, dtype=complex)
    norm = float(np.linalg.norm(a))
    if norm == 0.0:
        raise ValueError("alpha must not be the zero vector")
    n = len(a)
    u = a.conj() / norm
    partial = np.cumsum(np.abs(u) ** 2)  # partial[j-1] = |u_1|^2 + ... + |u_j|^2
    U = np.zeros((n, n), dtype=complex)
    U[-1] = u
    for j in range(1, n):
        s_j, s_next = partial[j - 1], partial[j]
        nxt = u[j]  # u_{j+1}
        if s_j == 0.0:
            U[j - 1, j - 1] = 1.0
        elif abs(nxt) == 0.0:
            U[j - 1, j] = -1.0
        else:
            scale = abs(nxt) / math.sqrt(s_j * s_next)
            U[j - 1, :j] = scale * u[:j]
            U[j - 1, j] = -math.sqrt(s_j / s_next) * nxt / abs(nxt)
    return RotationU(U, norm)


class EBasis:
    """Rotated generators E_ij as complex sparse matrices on a representation."""

    def __init__(self, rep: Representation, rot: RotationU):
        if rot.n != rep.n:
            raise ValueError("rotation size does not match the representation")
        self.rep = rep
        self.rot = rot
        self._cache: dict[tuple[int, int], sp.csc_matrix] = {}

    def __call__(self, i: int, j: int) -> sp.csc_matrix:
        key = (i, j)
        if key in self._cache:
            return self._cache[key]
        rep, U, n = self.rep, self.rot.U, self.rep.n
        if i == 0 and j == 0:
            m = rep.ef(0, 0)
        elif j == 0:
            m = sum(U[i - 1, l - 1] * rep.ef(l, 0) for l in range(1, n + 1) if U[i - 1, l - 1] != 0)
        elif i == 0:
            m = sum(
                U[j - 1, l - 1].conjugate() * rep.ef(0, l) for l in range(1, n + 1) if U[j - 1, l - 1] != 0
            )
        else:
            a, b = self(i, 0), self(0, j)
            m = a @ b + b @ a
            if i == j:
                m = m - rep.ef(0, 0)
        m = sp.csc_matrix(m)
        self._cache[key] = m
        return m


# ----------------------------------------------------------------- branching


@dataclass(frozen=True)
class BranchingComponent:
    gl1_weight: tuple[Fraction, Fraction]
    gln1_label: tuple[Fraction, ...]
    N: int
    binom_split: tuple[tuple[int, int], ...]
    allowed_rows: tuple[tuple[Fraction, ...], ...]
    singlet: bool = False

    @property
    def k_value(self) -> Fraction:
        """a + b, the squared eigenvalue of E_0n + E_n0 on the doublets."""
        return self.gl1_weight[0] + self.gl1_weight[1]

    @property
    def gln1_dim(self) -> int:
        return gl_n_dimension(self.gln1_label)

    @property
    def dimension(self) -> int:
        if self.singlet:
            return self.gln1_dim
        return sum(c * (2 if self.k_value > 0 else 1) for _, c in self.binom_split) * self.gln1_dim


def _middle_rows(hw: HighestWeight) -> list[tuple[Fraction, ...]]:
    """The set of (n-1)-tuples with m_{i,n+1}+1 >= m_{i,n-1} >= m_{i+1,n+1}."""
    n, m = hw.n, hw.m_top
    ranges = []
    for i in range(1, n):
        hi, lo = m[i] + 1, m[i + 1]
        ranges.append([hi - t for t in range(int(hi - lo) + 1)])
    out = []
    for row in itertools.product(*ranges):
        if all(row[i] >= row[i + 1] for i in range(len(row) - 1)):
            out.append(tuple(row))
    return out


def allowed_middle(hw: HighestWeight, lower: Sequence[Fraction]) -> list[tuple[Fraction, ...]]:
    """Rows [m]_n compatible with the top row and ``lower`` under (GZ2)-(GZ4)."""
    n, m = hw.n, hw.m_top
    out = []
    for theta in itertools.product((0, 1), repeat=n):
        if any(theta[k - 1] and m[0] + m[k] == k - 1 for k in range(1, n + 1)):
            continue
        row = tuple(m[i] + theta[i - 1] for i in range(1, n + 1))
        if all(row[i] >= lower[i] >= row[i + 1] for i in range(n - 1)):
            out.append(row)
    return out


def multiplicity_exponent(hw: HighestWeight, lower: Sequence[Fraction]) -> int:
    """N([m]_{n+1}, [m]_{n-1}): number of rows whose theta is free."""
    cls = require_unitary(hw)
    n, m = hw.n, hw.m_top
    upper = n if cls.kind is Kind.TYPICAL else cls.k - 1
    count = 0
    for i in range(1, upper + 1):
        ok = True
        if i > 1:
            d = lower[i - 2] - m[i] - 1
            ok &= d.denominator == 1 and d >= 0
        if i < n:
            d = m[i] - lower[i - 1]
            ok &= d.denominator == 1 and d >= 0
        count += ok
    return count


def branch(hw: HighestWeight) -> list[BranchingComponent]:
    require_unitary(hw)
    total = sum(hw.m_top)
    out = []
    for lower in _middle_rows(hw):
        allowed = allowed_middle(hw, lower)
        if not allowed:
            continue
        N = multiplicity_exponent(hw, lower)
        a = total - min(sum(r) for r in allowed)
        b = -a + total - sum(lower)
        if N == 0:
            out.append(BranchingComponent((a, b), lower, 0, (), tuple(allowed), singlet=True))
        else:
            split = tuple((i, comb(N - 1, i)) for i in range(N))
            out.append(BranchingComponent((a, b), lower, N, split, tuple(allowed)))
    return out


# ------------------------------------------------------------------ spectrum


@dataclass(frozen=True)
class SpectrumLevel:
    value: float
    multiplicity: int
    k: Fraction | None = None  # eigenvalue = sign * scale * sqrt(k) when known exactly


@dataclass(frozen=True)
class SpectrumReport:
    levels: tuple[SpectrumLevel, ...]
    scale: float = 1.0

    @property
    def dimension(self) -> int:
        return sum(lv.multiplicity for lv in self.levels)

    def values(self) -> np.ndarray:
        """Eigenvalues repeated by multiplicity, ascending."""
        return np.sort(np.repeat([lv.value for lv in self.levels], [lv.multiplicity for lv in self.levels]))

    def to_json(self) -> dict:
        return {
            "scale": self.scale,
            "levels": [{"value": lv.value, "multiplicity": lv.multiplicity} for lv in self.levels],
        }


def spectrum(hw: HighestWeight, alpha: Sequence[complex] | None = None, scale: float | None = None) -> SpectrumReport:
    """Spectrum from the branching rule; scale defaults to |alpha| (1 if absent)."""
    if scale is None:
        scale = 1.0 if alpha is None else float(np.linalg.norm(np.asarray(alpha, dtype=complex)))
    mult: Counter = Counter()
    for comp in branch(hw):
        d = comp.gln1_dim
        if comp.singlet:
            mult[(0, Fraction(0))] += d
            continue
        half = (2 ** (comp.N - 1)) * d
        mult[(1, comp.k_value)] += half
        mult[(-1, comp.k_value)] += half
    levels = [
        SpectrumLevel(sign * scale * math.sqrt(k), c, k)
        for (sign, k), c in mult.items()
    ]
    levels.sort(key=lambda lv: lv.value)
    return SpectrumReport(tuple(levels), scale)


# -------------------------------------------------------- highest weight |L>_E


@dataclass
class StateVector:
    basis: BasisIndex
    coeffs: np.ndarray

    def expansion(self, tol: float = 0.0) -> dict[GzPattern, complex]:
        return {p: complex(c) for p, c in zip(self.basis, self.coeffs) if abs(c) > tol}


@dataclass
class EigenvectorExpansion(StateVector):
    eigenvalue: float = 0.0
    label: tuple | None = None

    def to_json(self, tol: float = 1e-14) -> dict:
        return {
            "eigenvalue": self.eigenvalue,
            "coefficients": {
                p.key(): [c.real, c.imag] for p, c in self.expansion(tol).items()
            },
        }


def _md_pattern(hw: HighestWeight, d: Sequence[Fraction]) -> GzPattern:
    n, top = hw.n, tuple(hw.m_top)
    rows = [top, top[1:]]
    for k in range(n - 1, 0, -1):
        rows.append(tuple(top[1:k]) + (d[k - 1],))
    return GzPattern(tuple(rows))


def _md_labels(hw: HighestWeight) -> list[tuple[Fraction, ...]]:
    """All d = (m_11, ..., m_{n-1,n-1}) with m_{i+1,i+1} <= m_ii <= m_{i,n+1}."""
    n, m = hw.n, hw.m_top

    def rec(i: int, below: Fraction):
        # choose d_i given d_{i+1} = below
        if i == 0:
            yield ()
            return
        for t in range(int(m[i] - below) + 1):
            di = below + t
            for rest in rec(i - 1, di):
                yield rest + (di,)

    return list(rec(n - 1, m[n]))


def highest_weight_terms(hw: HighestWeight):
    """Yield ``(d, sign, binom, exps)`` for each |m(d)>_e in the closed form:
    coefficient = sign * sqrt(binom) * prod_l a_l**exps[l-1]."""
    n, m = hw.n, hw.m_top
    for d in _md_labels(hw):
        dd = list(d) + [m[n]]  # dd[i-1] = d_i, dd[n-1] = m_{n,n+1}
        binom = 1
        for i in range(1, n):
            binom *= comb(int(m[i] - dd[i]), int(m[i] - dd[i - 1]))
        exps = [int(m[1] - dd[0])] + [int(dd[l - 2] - dd[l - 1]) for l in range(2, n + 1)]
        sign = -1 if int(sum(m[i] - dd[i - 1] for i in range(1, n))) % 2 else 1
        yield d, sign, binom, exps


def normalization_identity(hw: HighestWeight, weights_sq: Sequence[Fraction]) -> tuple[Fraction, Fraction]:
    """Exact (sum of squared closed-form coefficients, calN) for |a_l|^2 = weights_sq."""
    w = [Fraction(x) for x in weights_sq]
    total = Fraction(0)
    for _, _, binom, exps in highest_weight_terms(hw):
        term = Fraction(binom)
        for wl, e in zip(w, exps):
            term *= wl**e
        total += term
    m = hw.m_top
    partial = list(itertools.accumulate(w))
    cal_n = Fraction(1)
    for k in range(1, hw.n):
        cal_n *= partial[k] ** int(m[k] - m[k + 1])
    return total, cal_n


def highest_weight_formula(hw: HighestWeight, rot: RotationU, basis: BasisIndex) -> np.ndarray:
    """Closed-form coefficients of |L>_E on the |m(d)>_e vectors (unnormalised
    if some rotation coefficient vanishes)."""
    n, m = hw.n, hw.m_top
    a = rot.coefficients.conj()  # proportional to alpha
    vec = np.zeros(len(basis), dtype=complex)
    for d, sign, binom, exps in highest_weight_terms(hw):
        mono = complex(1.0)
        for al, e in zip(a, exps):
            if e:
                mono *= al**e
        idx = basis.index(_md_pattern(hw, d))
        if idx is None:
            raise RuntimeError(f"pattern m(d) with d={d} missing from the basis")
        vec[idx] = sign * math.sqrt(binom) * mono
    norm_sq = 1.0
    partial = np.cumsum(np.abs(a) ** 2)
    for k in range(1, n):
        norm_sq *= partial[k] ** int(m[k] - m[k + 1])
    if norm_sq == 0.0:
        return vec
    return vec / math.sqrt(norm_sq)


def highest_weight_residual(E: EBasis, vec: np.ndarray) -> float:
    n = E.rep.n
    res = 0.0
    for j in range(1, n + 1):
        res = max(res, float(np.linalg.norm(E(0, j) @ vec)))
    for j in range(1, n):
        res = max(res, float(np.linalg.norm(E(j, j + 1) @ vec)))
    return res


def _highest_weight_nullspace(E: EBasis) -> np.ndarray:
    rep, n = E.rep, E.rep.n
    cols = [i for i, p in enumerate(rep.basis) if not any(p.theta)]
    blocks = [E(0, j)[:, cols] for j in range(1, n + 1)] + [E(j, j + 1)[:, cols] for j in range(1, n)]
    A = sp.vstack(blocks).toarray()
    _, s, vh = la.svd(A)
    null = vh[-1].conj()
    vec = np.zeros(rep.dim, dtype=complex)
    vec[cols] = null
    return vec


def rotated_highest_weight(
    hw: HighestWeight, rot: RotationU, basis: BasisIndex | None = None, rep: Representation | None = None
) -> StateVector:
    """|L>_E expanded in the e-basis GZ vectors, normalised."""
    rep = rep if rep is not None else Representation(hw, basis)
    E = EBasis(rep, rot)
    vec = highest_weight_formula(hw, rot, rep.basis)
    nrm = np.linalg.norm(vec)
    degenerate = np.any(np.abs(rot.coefficients) == 0.0)
    if nrm > 0 and abs(nrm - 1.0) < 1e-9:
        res = highest_weight_residual(E, vec)
        if res <= HW_RESIDUAL_TOL:
            return StateVector(rep.basis, vec)
        if not degenerate:
            raise RuntimeError(f"closed-form highest weight vector fails annihilation (residual {res:.3g})")
    elif not degenerate:
        raise RuntimeError("closed-form highest weight vector is not normalised")
    # vanishing coefficients: the closed form degenerates, solve for the kernel instead
    vec = _highest_weight_nullspace(E)
    return StateVector(rep.basis, vec / np.linalg.norm(vec))


# --------------------------------------------------------------- eigenvectors


@dataclass
class EigenSystem:
    vectors: list[EigenvectorExpansion]
    spectrum: SpectrumReport
    fallback: bool = False

    def matrix(self) -> np.ndarray:
        return np.column_stack([v.coeffs for v in self.vectors])

    def eigenvalues(self) -> np.ndarray:
        return np.array([v.eigenvalue for v in self.vectors])


def _orthonormal_columns(X: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    if X.shape[1] == 0:
        return X
    u, s, _ = la.svd(X, full_matrices=False)
    if s.size == 0 or s[0] == 0:
        return X[:, :0]
    rank = int(np.sum(s > tol * max(1.0, s[0])))
    return u[:, :rank]


def e_weight_spaces(E: EBasis, hw_vec: np.ndarray) -> dict[tuple, np.ndarray] | None:
    """Orthonormal bases of every E-weight space, generated by simple lowering
    operators from |L>_E.  None if some space comes out rank deficient."""
    rep, n = E.rep, E.rep.n
    expected = Counter(weight(p) for p in rep.basis)
    top = weight(highest_weight_pattern(rep.hw))
    lowering = []
    shift = [0] * (n + 1)
    shift[0], shift[1] = -1, 1
    lowering.append((E(1, 0), tuple(shift)))
    for k in range(1, n):
        shift = [0] * (n + 1)
        shift[k], shift[k + 1] = -1, 1
        lowering.append((E(k + 1, k), tuple(shift)))
    spaces: dict[tuple, np.ndarray] = {}
    frontier = {top: hw_vec.reshape(-1, 1)}
    while frontier:
        spaces.update(frontier)
        cand: dict[tuple, list] = defaultdict(list)
        for mu, B in frontier.items():
            for op, sh in lowering:
                nu = tuple(a + b for a, b in zip(mu, sh))
                if nu in expected:
                    cand[nu].append(op @ B)
        frontier = {}
        for nu, blocks in cand.items():
            B = _orthonormal_columns(np.hstack(blocks))
            if B.shape[1] != expected[nu]:
                return None
            frontier[nu] = B
    if sum(B.shape[1] for B in spaces.values()) != rep.dim:
        return None
    return spaces


def gl11_doublets(E: EBasis, spaces: dict[tuple, np.ndarray]):
    """Split each weight space into gl(1|1) tops v (E_0n v = 0, a+b > 0) and singlets.

    Returns ``(doublets, singlets)`` with doublets a list of (k, v, w).
    """
    n = E.rep.n
    e0n, en0 = E(0, n), E(n, 0)
    doublets, singlets = [], []
    for mu in sorted(spaces, reverse=True):
        B = spaces[mu]
        k = mu[0] + mu[n]
        if k == 0:
            singlets.extend(B.T)
            continue
        Y = e0n @ B
        _, s, vh = la.svd(Y, full_matrices=True)
        s = np.concatenate([s, np.zeros(B.shape[1] - s.size)])
        null = vh[s <= 1e-8 * max(1.0, math.sqrt(abs(k)))].conj().T
        if null.size == 0:
            continue
        V = B @ null
        W = (en0 @ V) / math.sqrt(k)
        for col in range(V.shape[1]):
            doublets.append((k, V[:, col], W[:, col]))
    return doublets, singlets


def _from_doublets(rep, E, alpha_norm, momentum: bool):
    spaces = e_weight_spaces(E, rotated_highest_weight(rep.hw, E.rot, rep=rep).coeffs)
    if spaces is None:
        return None
    doublets, singlets = gl11_doublets(E, spaces)
    if 2 * len(doublets) + len(singlets) != rep.dim:
        return None
    out = []
    r2 = math.sqrt(2.0)
    for k, v, w in doublets:
        lam = alpha_norm * math.sqrt(k)
        if momentum:
            out.append(EigenvectorExpansion(rep.basis, (v + 1j * w) / r2, -lam))
            out.append(EigenvectorExpansion(rep.basis, (v - 1j * w) / r2, lam))
        else:
            out.append(EigenvectorExpansion(rep.basis, (v + w) / r2, lam))
            out.append(EigenvectorExpansion(rep.basis, (v - w) / r2, -lam))
    for v in singlets:
        out.append(EigenvectorExpansion(rep.basis, np.asarray(v), 0.0))
    return out


def eigenvectors(
    hw: HighestWeight, alpha: Sequence[complex], basis: BasisIndex | None = None, rep: Representation | None = None
) -> EigenSystem:
    """Orthonormal eigenbasis of the odd element built from gl(1|1) doublets."""
    rep = rep if rep is not None else Representation(hw, basis)
    rot = build_rotation(alpha)
    E = EBasis(rep, rot)
    vecs = _from_doublets(rep, E, rot.norm, momentum=False)
    return _finish(hw, rep, alpha, vecs, spectrum(hw, alpha))


def momentum_variant(
    hw: HighestWeight, coeffs: Sequence[complex], basis: BasisIndex | None = None, rep: Representation | None = None
) -> EigenSystem:
    """Eigen-decomposition of i*sum_j (c_j e_0j - conj(c_j) e_j0).

    The rotation is built from ``c`` (without the factor i), so the operator
    reads i|c|(E_0n - E_n0) and its eigenvectors are (v -/+ i w)/sqrt 2.
    """
    rep = rep if rep is not None else Representation(hw, basis)
    c = np.asarray(coeffs, dtype=complex)
    rot = build_rotation(c)
    E = EBasis(rep, rot)
    vecs = _from_doublets(rep, E, rot.norm, momentum=True)
    return _finish(hw, rep, 1j * c, vecs, spectrum(hw, c))


def _finish(hw, rep, alpha, vecs, spec) -> EigenSystem:
    if vecs is not None:
        return EigenSystem(vecs, spec)
    warnings.warn(
        f"doublet construction broke down for W({hw.label_str()}); using dense diagonalization",
        EigenvectorFallbackWarning,
        stacklevel=3,
    )
    M = odd_sparse(alpha, rep).toarray()
    oracle = oracle_diagonalize(M)
    vecs = [EigenvectorExpansion(rep.basis, oracle.vectors[:, i], float(oracle.values[i])) for i in range(rep.dim)]
    return EigenSystem(vecs, spec, fallback=True)


# --------------------------------------------------------------------- oracle


@dataclass
class OracleResult:
    report: SpectrumReport
    values: np.ndarray
    vectors: np.ndarray


def cluster_eigenvalues(values: np.ndarray, rel_tol: float = 1e-8) -> list[SpectrumLevel]:
    values = np.sort(np.asarray(values, dtype=float))
    if values.size == 0:
        return []
    tol = rel_tol * float(np.max(np.abs(values)))
    levels, group = [], [values[0]]
    for x in values[1:]:
        if x - group[-1] > tol:
            levels.append(SpectrumLevel(float(np.mean(group)), len(group)))
            group = [x]
        else:
            group.append(x)
    levels.append(SpectrumLevel(float(np.mean(group)), len(group)))
    return levels


def oracle_diagonalize(matrix, herm_tol: float = 1e-12, scale: float = 1.0) -> OracleResult:
    """Dense Hermitian eigendecomposition with multiplicity clustering."""
    if sp.issparse(matrix):
        M = matrix.toarray()
    elif hasattr(matrix, "to_dense"):
        M = matrix.to_dense()
    else:
        M = np.asarray(matrix)
    M = M.astype(complex)
    if M.shape[0] != M.shape[1]:
        raise ValueError("matrix is not square")
    if M.size and np.max(np.abs(M - M.conj().T)) > herm_tol * max(1.0, np.max(np.abs(M))):
        raise ValueError("matrix is not Hermitian")
    vals, vecs = la.eigh(M)
    return OracleResult(SpectrumReport(tuple(cluster_eigenvalues(vals)), scale), vals, vecs)


def same_spectrum(a: SpectrumReport, b: SpectrumReport, tol: float) -> bool:
    """Level-by-level comparison: equal multiplicities, values within tol."""
    if len(a.levels) != len(b.levels):
        return False
    return all(
        x.multiplicity == y.multiplicity and abs(x.value - y.value) <= tol
        for x, y in zip(a.levels, b.levels)
    )


# -------------------------------------------------------- telescoping identity


def telescoping_lhs(x: Sequence, y: Sequence, j: int) -> Fraction:
    x = [Fraction(v) for v in x]
    y = [Fraction(v) for v in y]
    if j < 1 or len(x) < j or len(y) < j:
        raise ValueError("need j >= 1 and at least j values of x and y")
    X = lambda i: x[i - 1]  # noqa: E731
    Y = lambda i: y[i - 1]  # noqa: E731
    for i in range(1, j):
        if X(i) == Y(i + 1):
            raise ZeroDivisionError(f"x_{i} == y_{i + 1}")

    def ratio(lo: int) -> Fraction:
        num = Fraction(1)
        for i in range(lo + 1, j + 1):
            num *= X(i) - Y(i)
        den = Fraction(1)
        for i in range(lo, j):
            den *= X(i) - Y(i + 1)
        return num / den

    total = (X(1) - Y(1)) * ratio(1)
    for l in range(1, j):
        total += (Y(l) - Y(l + 1)) * ratio(l)
    return total


def telescoping_identity_check(x: Sequence, y: Sequence, j: int) -> bool:
    return telescoping_lhs(x, y, j) == Fraction(x[j - 1]) - Fraction(y[j - 1])
