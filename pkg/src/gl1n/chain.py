"""The n-oscillator chain: mode data, position/momentum operators, and the
closed-form Fock W(p) and ladder V(p) eigenproblems."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .gz import BasisIndex, GzPattern, HighestWeight, hamiltonian_energy, weight
from .matrices import GeneratorMatrix, Representation, odd_sparse
from .odd import (
    EBasis,
    EigenvectorExpansion,
    SpectrumLevel,
    SpectrumReport,
    build_rotation,
)
from .scalars import SurdScalar

BETA_TOL = 1e-12


class CouplingError(ValueError):
    pass


@dataclass(frozen=True)
class ChainConfig:
    n: int
    mu: float = 1.0
    omega: float = 1.0
    c: float = 0.0
    hbar: float = 1.0

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("the chain needs n >= 2 oscillators")
        for name in ("mu", "omega", "hbar"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not self.c >= 0:
            raise ValueError("coupling c must be nonnegative")


@dataclass(frozen=True)
class ModeData:
    omega_j: np.ndarray
    beta_j: np.ndarray
    gamma_j: np.ndarray

    @property
    def gamma(self) -> float:
        return float(np.sum(self.gamma_j**2))

    @property
    def beta(self) -> float:
        return float(np.sum(self.beta_j))


def mode_frequencies(n: int, omega: float, c: float) -> np.ndarray:
    j = np.arange(1, n + 1)
    return np.sqrt(omega**2 + 4 * c * np.sin(np.pi * j / n) ** 2)


def _betas(n: int, omega: float, c: float) -> np.ndarray:
    w = mode_frequencies(n, omega, c)
    return -w + w.sum() / (n - 1)


def critical_coupling(n: int, omega: float = 1.0) -> float:
    """Largest c keeping every beta_j >= 0 (inf if there is no bound)."""
    if n < 2:
        raise ValueError("n >= 2 required")
    f = lambda c: float(np.min(_betas(n, omega, c)))  # noqa: E731
    if n == 2:
        return math.inf
    # beta_j grows like sqrt(c) times a fixed profile; scan decades for a sign change
    lo = 0.0
    hi = None
    for k in range(-6, 31):
        c = omega**2 * 10.0**k
        if f(c) < -BETA_TOL * math.sqrt(omega**2 + 4 * c):
            hi = c
            break
        lo = c
    if hi is None:
        return math.inf
    while hi - lo > 1e-14 * hi:
        mid = 0.5 * (lo + hi)
        if f(mid) >= 0:
            lo = mid
        else:
            hi = mid
    return lo


def mode_data(cfg: ChainConfig) -> ModeData:
    w = mode_frequencies(cfg.n, cfg.omega, cfg.c)
    beta = -w + w.sum() / (cfg.n - 1)
    if np.any(beta < -BETA_TOL * w.max()):
        c0 = critical_coupling(cfg.n, cfg.omega)
        raise CouplingError(f"coupling c={cfg.c} exceeds the critical value c0={c0:.12g}")
    beta = np.clip(beta, 0.0, None)
    return ModeData(w, beta, np.sqrt(beta) / w)


@dataclass(frozen=True)
class OddOperator:
    """alpha coefficients of sum_j alpha_j e_0j + h.c., with the scale |alpha|."""

    alpha: np.ndarray
    scale: float
    coeffs: np.ndarray  # for momentum: alpha / i


def _phases(n: int, r: int) -> np.ndarray:
    j = np.arange(1, n + 1)
    return np.exp(-2j * np.pi * j * r / n)


def position_operator(cfg: ChainConfig, r: int) -> OddOperator:
    md = mode_data(cfg)
    pref = math.sqrt(cfg.hbar / (cfg.mu * cfg.n))
    alpha = pref * md.gamma_j * _phases(cfg.n, r)
    return OddOperator(alpha, math.sqrt(cfg.hbar * md.gamma / (cfg.mu * cfg.n)), alpha)


def momentum_operator(cfg: ChainConfig, r: int) -> OddOperator:
    md = mode_data(cfg)
    pref = math.sqrt(cfg.mu * cfg.hbar / cfg.n)
    coeffs = pref * np.sqrt(md.beta_j) * _phases(cfg.n, r)
    return OddOperator(1j * coeffs, math.sqrt(cfg.mu * cfg.hbar * md.beta / cfg.n), coeffs)


OBSERVABLES = ("position", "momentum")


def observable_operator(cfg: ChainConfig, r: int, observable: str = "position") -> OddOperator:
    if observable == "position":
        return position_operator(cfg, r)
    if observable == "momentum":
        return momentum_operator(cfg, r)
    raise ValueError(f"unknown observable {observable!r}; expected one of {OBSERVABLES}")


def _mode_weights(cfg: ChainConfig, observable: str) -> np.ndarray:
    """gamma_j for position, sqrt(beta_j) for momentum."""
    md = mode_data(cfg)
    if observable == "position":
        return md.gamma_j
    if observable == "momentum":
        return np.sqrt(md.beta_j)
    raise ValueError(f"unknown observable {observable!r}; expected one of {OBSERVABLES}")


def hamiltonian_matrix(rep: Representation, beta: Sequence, hbar: float = 1.0) -> sp.csc_matrix:
    """hbar * ((sum beta) e_00 + sum_j beta_j e_jj)."""
    total = sum(beta)
    M = total * rep.ef(0, 0)
    for j, b in enumerate(beta, start=1):
        M = M + b * rep.ef(j, j)
    return (hbar * M).tocsc()


def stationary_energies(basis: BasisIndex, beta: Sequence, hbar: float = 1.0) -> list:
    return [hbar * hamiltonian_energy(p, beta) for p in basis]


# ----------------------------------------------------------------- Fock W(p)


@dataclass(frozen=True)
class FockState:
    phi: tuple[int, ...]

    def __post_init__(self):
        if any(x not in (0, 1) for x in self.phi):
            raise ValueError("Fock labels must be bits")

    @property
    def size(self) -> int:
        return sum(self.phi)


def fock_state(pat: GzPattern) -> FockState:
    """phi_i = sum_j m_{ji} - sum_j m_{j,i-1}, i.e. the e_ii eigenvalue."""
    return FockState(tuple(int(x) for x in weight(pat)[1:]))


def fock_index(basis: BasisIndex) -> dict[tuple[int, ...], int]:
    return {fock_state(p).phi: i for i, p in enumerate(basis)}


def fock_states(n: int, p: int) -> list[FockState]:
    return [FockState(phi) for phi in itertools.product((0, 1), repeat=n) if sum(phi) <= min(p, n)]


def fock_action(i: int, j: int, p: int, basis: BasisIndex) -> GeneratorMatrix:
    """Closed-form Fock action of e_00, e_kk, e_k0 or e_0k on w(phi)."""
    idx = fock_index(basis)
    ent = {}
    for phi, col in idx.items():
        size = sum(phi)
        if i == j == 0:
            val, target = SurdScalar.from_rational(p - size), phi
        elif i == j:
            val, target = SurdScalar.from_rational(phi[i - 1]), phi
        elif j == 0:
            k = i
            if phi[k - 1]:
                continue
            sign = -1 if sum(phi[: k - 1]) % 2 else 1
            val = SurdScalar.of(sign, p - size)
            target = phi[: k - 1] + (1,) + phi[k:]
        elif i == 0:
            k = j
            if not phi[k - 1]:
                continue
            sign = -1 if sum(phi[: k - 1]) % 2 else 1
            val = SurdScalar.of(sign, p - size + 1)
            target = phi[: k - 1] + (0,) + phi[k:]
        else:
            raise ValueError("only e_00, e_kk, e_k0, e_0k have closed forms here")
        if val and target in idx:
            ent[(idx[target], col)] = val
    return GeneratorMatrix(len(basis), ent, (i, j), True)


def _apply_string(ops, vec):
    for op in ops:
        vec = op @ vec
    return vec


def fock_eigenvectors(
    p: int, cfg: ChainConfig, r: int, rep: Representation | None = None, observable: str = "position"
) -> list[EigenvectorExpansion]:
    """Eigenvectors of q_r (or p_r) in W(p) from v(phi) = E_10^phi_1 ... E_n0^phi_n w(0).

    Labels are ``(sign, K, phi')``; sign 0 marks the zero modes.
    """
    n = cfg.n
    rep = rep if rep is not None else Representation(HighestWeight.fock(n, p))
    op = observable_operator(cfg, r, observable)
    E = EBasis(rep, build_rotation(op.alpha))
    v0 = np.zeros(rep.dim, dtype=complex)
    v0[fock_index(rep.basis)[(0,) * n]] = 1.0

    def v(phi):
        ops = [E(k, 0) for k in range(n, 0, -1) if phi[k - 1]]
        norm = math.sqrt(math.prod(range(p - sum(phi) + 1, p + 1)))
        return _apply_string(ops, v0) / norm

    out = []
    r2 = math.sqrt(2.0)
    for head in itertools.product((0, 1), repeat=n - 1):
        K = sum(head)
        if K > p:
            continue
        if K == p:
            out.append(EigenvectorExpansion(rep.basis, v(head + (0,)), 0.0, (0, K, head)))
            continue
        x = op.scale * math.sqrt(p - K)
        sgn = -1 if K % 2 else 1
        lo, hi = v(head + (0,)), v(head + (1,))
        out.append(EigenvectorExpansion(rep.basis, (lo + sgn * hi) / r2, x, (1, K, head)))
        out.append(EigenvectorExpansion(rep.basis, (lo - sgn * hi) / r2, -x, (-1, K, head)))
    return out


def fock_spectrum(p: int, cfg: ChainConfig, r: int = 1, observable: str = "position") -> SpectrumReport:
    n = cfg.n
    scale = observable_operator(cfg, r, observable).scale
    levels = []
    for K in range(0, min(p, n - 1) + 1):
        if K == p:
            levels.append(SpectrumLevel(0.0, comb(n - 1, p), Fraction(0)))
        else:
            x = scale * math.sqrt(p - K)
            levels += [SpectrumLevel(x, comb(n - 1, K), Fraction(p - K)), SpectrumLevel(-x, comb(n - 1, K), Fraction(p - K))]
    levels.sort(key=lambda lv: lv.value)
    return SpectrumReport(tuple(levels), scale)


def fock_probabilities(
    p: int, cfg: ChainConfig, state: FockState, r: int = 1, observable: str = "position"
) -> dict[float, float]:
    """Closed-form outcome distribution of q_r (or p_r) in the stationary state w(phi).

    Keys are eigenvalues; when p - K = 0 the two signs merge into 0.
    """
    n = cfg.n
    phi = state.phi
    if len(phi) != n or state.size > min(p, n):
        raise ValueError(f"{phi} is not a basis state of W({p}) for n={n}")
    scale = observable_operator(cfg, r, observable).scale
    g2 = _mode_weights(cfg, observable) ** 2
    total = 2 * float(g2.sum())
    size = state.size
    out: dict[float, float] = {}
    terms = [(size, float(np.dot(1 - np.array(phi), g2)) / total)]
    if size >= 1:
        terms.append((size - 1, float(np.dot(np.array(phi), g2)) / total))
    for K, prob in terms:
        if K > p:
            continue
        x = scale * math.sqrt(p - K)
        if x == 0.0:
            out[0.0] = out.get(0.0, 0.0) + 2 * prob
        else:
            out[x] = out.get(x, 0.0) + prob
            out[-x] = out.get(-x, 0.0) + prob
    return out


def overlap_probabilities(vectors: Sequence[EigenvectorExpansion], state_index: int) -> dict[float, float]:
    """Sum |<psi|w>|^2 over eigenvectors sharing an eigenvalue."""
    out: dict[float, float] = {}
    for vec in vectors:
        out[vec.eigenvalue] = out.get(vec.eigenvalue, 0.0) + abs(vec.coeffs[state_index]) ** 2
    return out


# --------------------------------------------------------------- ladder V(p)


@dataclass(frozen=True)
class LadderState:
    theta: int
    s: tuple[int, ...]

    def __post_init__(self):
        if self.theta not in (0, 1) or any(x < 0 for x in self.s):
            raise ValueError("need theta in {0,1} and s_i >= 0")


def ladder_state(pat: GzPattern, p: int) -> LadderState:
    n = pat.n
    row1 = [int(pat.m(1, k)) for k in range(1, n + 1)]
    s = (row1[0],) + tuple(row1[k] - row1[k - 1] for k in range(1, n))
    return LadderState(p - row1[-1], s)


def ladder_index(basis: BasisIndex, p: int) -> dict[tuple, int]:
    out = {}
    for i, pat in enumerate(basis):
        st = ladder_state(pat, p)
        out[(st.theta, st.s)] = i
    return out


def ladder_states(n: int, p: int) -> list[LadderState]:
    out = []
    for theta in (1, 0):
        rest = p - theta
        for bars in itertools.combinations(range(rest + n - 1), n - 1):
            s, prev = [], -1
            for b in bars + (rest + n - 1,):
                s.append(b - prev - 1)
                prev = b
            out.append(LadderState(theta, tuple(s)))
    return out


def ladder_action(i: int, j: int, p: int, basis: BasisIndex) -> GeneratorMatrix:
    """Closed-form ladder action of e_00, e_kk, e_k0 or e_0k on w(theta; s)."""
    idx = ladder_index(basis, p)
    ent = {}
    for (theta, s), col in idx.items():
        if i == j == 0:
            val, target = SurdScalar.from_rational(theta), (theta, s)
        elif i == j:
            val, target = SurdScalar.from_rational(s[i - 1]), (theta, s)
        elif j == 0:
            k = i
            val = SurdScalar.of(theta, s[k - 1] + 1)
            target = (1 - theta, s[: k - 1] + (s[k - 1] + 1,) + s[k:])
        elif i == 0:
            k = j
            val = SurdScalar.of(1 - theta, s[k - 1])
            target = (1 - theta, s[: k - 1] + (s[k - 1] - 1,) + s[k:])
        else:
            raise ValueError("only e_00, e_kk, e_k0, e_0k have closed forms here")
        if val and target in idx:
            ent[(idx[target], col)] = val
    return GeneratorMatrix(len(basis), ent, (i, j), True)


def ladder_highest_weight(
    p: int, cfg: ChainConfig, r: int, basis: BasisIndex, observable: str = "position"
) -> np.ndarray:
    """|L>_E of V(p) as a sum over w(1; u, p-1-u, 0, ..., 0), up to a global phase."""
    n = cfg.n
    g = _mode_weights(cfg, observable)
    idx = ladder_index(basis, p)
    vec = np.zeros(len(basis), dtype=complex)
    norm = (g[0] ** 2 + g[1] ** 2) ** ((p - 1) / 2)
    for u in range(p):
        s = (u, p - 1 - u) + (0,) * (n - 2)
        coef = (-1) ** u * np.exp(-2j * np.pi * r * u / n) * math.sqrt(comb(p - 1, u))
        coef *= g[0] ** (p - 1 - u) * g[1] ** u
        vec[idx[(1, s)]] = coef / norm
    return vec


def _pochhammer(a: int, k: int) -> int:
    return math.prod(range(a, a + k))


def ladder_eigen(
    p: int, cfg: ChainConfig, r: int, rep: Representation | None = None, observable: str = "position"
) -> tuple[SpectrumReport, list[EigenvectorExpansion]]:
    """Spectrum and eigenvectors of q_r (or p_r) in V(p) from v(phi; t) strings."""
    n = cfg.n
    rep = rep if rep is not None else Representation(HighestWeight.ladder(n, p))
    op = observable_operator(cfg, r, observable)
    E = EBasis(rep, build_rotation(op.alpha))
    top = ladder_highest_weight(p, cfg, r, rep.basis, observable)

    def v(phi: int, t: Sequence[int]):
        vec = top
        if phi == 0:
            vec = E(1, 0) @ vec
        den = p ** (1 - phi)
        for k in range(1, n):
            e = p - phi - sum(t[:k])
            for _ in range(e):
                vec = E(k + 1, k) @ vec
            den *= factorial(e) * _pochhammer(t[k - 1] + 1, e)
        return vec / math.sqrt(den)

    vectors = []
    r2 = math.sqrt(2.0)
    for K in range(p + 1):
        for bars in itertools.combinations(range(K + n - 2), n - 2):
            t, prev = [], -1
            for b in bars + (K + n - 2,):
                t.append(b - prev - 1)
                prev = b
            t = tuple(t)
            if K == p:
                vectors.append(EigenvectorExpansion(rep.basis, v(0, t + (0,)), 0.0, (0, K, t)))
                continue
            x = op.scale * math.sqrt(p - K)
            hi, lo = v(1, t + (p - 1 - K,)), v(0, t + (p - K,))
            vectors.append(EigenvectorExpansion(rep.basis, (hi + lo) / r2, x, (1, K, t)))
            vectors.append(EigenvectorExpansion(rep.basis, (hi - lo) / r2, -x, (-1, K, t)))
    levels = [SpectrumLevel(0.0, comb(n - 2 + p, n - 2), Fraction(0))]
    for K in range(p):
        x = op.scale * math.sqrt(p - K)
        m = comb(n - 2 + K, K)
        levels += [SpectrumLevel(x, m, Fraction(p - K)), SpectrumLevel(-x, m, Fraction(p - K))]
    levels.sort(key=lambda lv: lv.value)
    return SpectrumReport(tuple(levels), op.scale), vectors


def position_matrix(rep: Representation, cfg: ChainConfig, r: int) -> sp.csc_matrix:
    return odd_sparse(position_operator(cfg, r).alpha, rep)


def momentum_matrix(rep: Representation, cfg: ChainConfig, r: int) -> sp.csc_matrix:
    return odd_sparse(momentum_operator(cfg, r).alpha, rep)


def ladder_operators(rep: Representation, cfg: ChainConfig):
    """a_j^- and a_j^+ as sqrt(2 beta_j / omega_j) e_j0 and e_0j."""
    md = mode_data(cfg)
    minus, plus = [], []
    for j in range(1, cfg.n + 1):
        f = math.sqrt(2 * md.beta_j[j - 1] / md.omega_j[j - 1])
        minus.append(f * rep.ef(j, 0))
        plus.append(f * rep.ef(0, j))
    return minus, plus
