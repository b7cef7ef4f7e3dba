"""Invariant suites comparing the closed-form constructions with brute force."""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse.linalg as spla

from . import chain
from .gz import HighestWeight
from .matrices import GeneratorMatrix, Representation, exact_combination, graded_commutator, odd_sparse, parity
from .odd import (
    EBasis,
    branch,
    build_rotation,
    eigenvectors,
    highest_weight_residual,
    oracle_diagonalize,
    rotated_highest_weight,
    same_spectrum,
    spectrum,
)


@dataclass
class SuiteResult:
    name: str
    passed: bool
    checked: int
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed, "checked": self.checked, "detail": self.detail}


def generator_pairs(n: int, count: int | None, rng: random.Random) -> list[tuple[tuple[int, int], tuple[int, int]]]:
    """All ordered pairs (e_ij, e_kl), or a deterministic sample of ``count``."""
    gens = [(i, j) for i in range(n + 1) for j in range(n + 1)]
    pairs = list(itertools.product(gens, gens))
    if count is None or count >= len(pairs):
        return pairs
    return rng.sample(pairs, count)


def expected_bracket(rep: Representation, a: tuple[int, int], b: tuple[int, int]) -> GeneratorMatrix:
    """delta_jk e_il - (-1)^{deg a deg b} delta_li e_kj."""
    (i, j), (k, l) = a, b
    sign = -1 if parity(i, j) and parity(k, l) else 1
    terms = []
    if j == k:
        terms.append((1, rep.e(i, l).as_sums()))
    if l == i:
        terms.append((-sign, rep.e(k, j).as_sums()))
    return GeneratorMatrix(rep.dim, exact_combination(terms), None, True)


def check_brackets(rep: Representation, pairs) -> SuiteResult:
    failures = []
    for a, b in pairs:
        got = graded_commutator(rep.e(*a), rep.e(*b))
        if not got.exact_equal(expected_bracket(rep, a, b)):
            failures.append([list(a), list(b)])
    return SuiteResult("graded_bracket", not failures, len(pairs), {"failures": failures[:10]})


def check_star(rep: Representation) -> SuiteResult:
    n = rep.n
    failures = []
    count = 0
    for i in range(n + 1):
        for j in range(n + 1):
            count += 1
            if not rep.e(i, j).dagger().exact_equal(rep.e(j, i)):
                failures.append([i, j])
    return SuiteResult("star_condition", not failures, count, {"failures": failures})


def random_alpha(n: int, rng: np.random.Generator) -> np.ndarray:
    return rng.normal(size=n) + 1j * rng.normal(size=n)


def check_spectrum(rep: Representation, alphas, rel_tol: float = 1e-8) -> SuiteResult:
    failures = []
    for alpha in alphas:
        scale = float(np.linalg.norm(alpha))
        theorem = spectrum(rep.hw, alpha)
        M = np.zeros((rep.dim, rep.dim), dtype=complex)
        for j, a in enumerate(alpha, start=1):
            M += a * rep.ef(0, j).toarray() + np.conj(a) * rep.ef(j, 0).toarray()
        oracle = oracle_diagonalize(M, scale=scale).report
        if not same_spectrum(theorem, oracle, rel_tol * scale):
            failures.append({"alpha": [[z.real, z.imag] for z in alpha]})
    return SuiteResult("spectrum_vs_oracle", not failures, len(alphas), {"failures": failures})


def check_highest_weight(rep: Representation, alphas, tol: float = 1e-10, norm_tol: float = 1e-12) -> SuiteResult:
    worst_res, worst_norm = 0.0, 0.0
    for alpha in alphas:
        rot = build_rotation(alpha)
        vec = rotated_highest_weight(rep.hw, rot, rep=rep).coeffs
        worst_res = max(worst_res, highest_weight_residual(EBasis(rep, rot), vec))
        worst_norm = max(worst_norm, abs(np.linalg.norm(vec) - 1.0))
    worst_norm = float(worst_norm)
    ok = bool(worst_res <= tol and worst_norm <= norm_tol)
    return SuiteResult("highest_weight", ok, len(alphas), {"max_residual": worst_res, "max_norm_error": worst_norm})


def operator_norm(M) -> float:
    if M.shape[0] <= 400:
        return float(np.linalg.norm(M.toarray() if hasattr(M, "toarray") else M, 2))
    return float(spla.svds(M, k=1, return_singular_vectors=False)[0])


def eigen_quality(M, vectors) -> tuple[float, float]:
    """Max ||Mv - lv|| / ||M|| and max |V^H V - I|."""
    V = np.column_stack([v.coeffs for v in vectors])
    lam = np.array([v.eigenvalue for v in vectors])
    nrm = operator_norm(M) or 1.0
    res = np.linalg.norm(M @ V - V * lam, axis=0).max() / nrm
    gram = np.abs(V.conj().T @ V - np.eye(V.shape[1])).max()
    return float(res), float(gram)


def check_eigenvectors(rep: Representation, alphas, tol: float = 1e-10) -> SuiteResult:
    worst_res, worst_gram, fallback = 0.0, 0.0, False
    for alpha in alphas:
        sys = eigenvectors(rep.hw, alpha, rep=rep)
        fallback |= sys.fallback
        M = sum(a * rep.ef(0, j) + np.conj(a) * rep.ef(j, 0) for j, a in enumerate(alpha, start=1))
        res, gram = eigen_quality(M, sys.vectors)
        if len(sys.vectors) != rep.dim:
            gram = float("inf")
        worst_res, worst_gram = max(worst_res, res), max(worst_gram, gram)
    ok = bool(worst_res <= tol and worst_gram <= tol)
    return SuiteResult(
        "eigenvectors",
        ok,
        len(alphas),
        {"max_relative_residual": worst_res, "max_gram_error": worst_gram, "oracle_fallback": fallback},
    )


def check_branching(rep: Representation) -> SuiteResult:
    comps = branch(rep.hw)
    total = sum(c.dimension for c in comps)
    return SuiteResult("branching_dimension", total == rep.dim, len(comps), {"sum": total, "dim": rep.dim})


def run_suites(hw: HighestWeight, seed: int = 0, pairs: int | None = 40, alphas: int = 3) -> list[SuiteResult]:
    rep = Representation(hw)
    rng = random.Random(seed)
    nrng = np.random.default_rng(seed)
    avs = [random_alpha(hw.n, nrng) for _ in range(alphas)]
    return [
        check_brackets(rep, generator_pairs(hw.n, pairs, rng)),
        check_star(rep),
        check_branching(rep),
        check_spectrum(rep, avs),
        check_highest_weight(rep, avs),
        check_eigenvectors(rep, avs),
    ]


def check_closed_form_actions(rep: Representation, kind: str, p: int) -> SuiteResult:
    action = chain.fock_action if kind == "fock" else chain.ladder_action
    n = rep.n
    elems = [(0, 0)] + [(k, k) for k in range(1, n + 1)]
    elems += [(k, 0) for k in range(1, n + 1)] + [(0, k) for k in range(1, n + 1)]
    failures = [list(e) for e in elems if not action(*e, p, rep.basis).exact_equal(rep.e(*e))]
    return SuiteResult(f"{kind}_closed_form_actions", not failures, len(elems), {"failures": failures})


def check_chain_eigenvectors(
    rep: Representation, kind: str, p: int, cfg: chain.ChainConfig, r: int, observable: str, tol: float = 1e-10
) -> SuiteResult:
    if kind == "fock":
        vectors = chain.fock_eigenvectors(p, cfg, r, rep, observable)
    else:
        vectors = chain.ladder_eigen(p, cfg, r, rep, observable)[1]
    M = odd_sparse(chain.observable_operator(cfg, r, observable).alpha, rep)
    res, gram = eigen_quality(M, vectors)
    if len(vectors) != rep.dim:
        gram = float("inf")
    ok = bool(res <= tol and gram <= tol)
    return SuiteResult(
        f"{kind}_eigenvectors", ok, len(vectors), {"max_relative_residual": res, "max_gram_error": gram}
    )


def check_fock_probabilities(
    rep: Representation, p: int, cfg: chain.ChainConfig, r: int, observable: str, tol: float = 1e-10
) -> SuiteResult:
    vectors = chain.fock_eigenvectors(p, cfg, r, rep, observable)
    idx = chain.fock_index(rep.basis)
    worst, worst_sum = 0.0, 0.0
    states = chain.fock_states(cfg.n, p)
    for st in states:
        law = chain.fock_probabilities(p, cfg, st, r, observable)
        overlap = chain.overlap_probabilities(vectors, idx[st.phi])
        for key in set(law) | set(overlap):
            worst = max(worst, abs(law.get(key, 0.0) - overlap.get(key, 0.0)))
        worst_sum = max(worst_sum, abs(sum(law.values()) - 1.0))
    ok = bool(worst <= tol and worst_sum <= 1e-12)
    return SuiteResult("fock_probabilities", ok, len(states), {"max_difference": worst, "max_sum_error": worst_sum})


def run_chain_suites(
    kind: str, n: int, p: int, cfg: chain.ChainConfig, r: int = 1, observable: str = "position", seed: int = 0
) -> list[SuiteResult]:
    hw = HighestWeight.fock(n, p) if kind == "fock" else HighestWeight.ladder(n, p)
    rep = Representation(hw)
    out = run_suites(hw, seed)
    out.append(check_closed_form_actions(rep, kind, p))
    out.append(check_chain_eigenvectors(rep, kind, p, cfg, r, observable))
    if kind == "fock":
        out.append(check_fock_probabilities(rep, p, cfg, r, observable))
    return out
