import itertools
from fractions import Fraction

import numpy as np
import pytest

from gl1n import chain
from gl1n.gz import HighestWeight, NotUnitaryError, enumerate_basis, hamiltonian_energy, highest_weight_pattern
from gl1n.matrices import (
    GeneratorMatrix,
    Representation,
    TranscriptionError,
    _combine_radicands,
    assemble_odd,
    diagonal_action,
    exact_combination,
    export_coo,
    export_exact,
    graded_commutator,
    odd_sparse,
    parse_exact,
    raise_lower_even,
)
from gl1n.scalars import SurdScalar
from gl1n.verify import check_brackets, check_star, expected_bracket, generator_pairs


def unit(rep, pat):
    v = np.zeros(rep.dim, dtype=complex)
    v[rep.basis.index(pat)] = 1
    return v


def test_diagonal_action_examples():
    hw = HighestWeight.of([4, 2, 1, 0])
    assert diagonal_action(0, highest_weight_pattern(hw)) == 4
    a, b = Fraction(7, 2), Fraction(3, 2)
    rep = Representation(HighestWeight.of([a, b]))
    v = highest_weight_pattern(rep.hw)
    (w,) = [p for p in rep.basis if p != v]
    assert diagonal_action(0, w) == a - 1
    assert diagonal_action(1, w) == b + 1
    for pat in enumerate_basis(HighestWeight.fock(3, 2)):
        phi = chain.fock_state(pat).phi
        for k in (1, 2, 3):
            assert diagonal_action(k, pat) == phi[k - 1]


def test_e12_matches_odd_bracket():
    rep = Representation(HighestWeight.of([5, 3, 1]))
    direct = raise_lower_even(2, "raise", rep.basis)
    built = graded_commutator(rep.e(1, 0), rep.e(0, 2))
    assert direct.exact_equal(built)
    # a single surd per column, for the pattern with m_11 = b2
    col = [p for p in rep.basis if p.m(1, 1) == 1 and p.theta == (0, 0)][0]
    entries = [v for (r, c), v in direct.entries.items() if c == rep.basis.index(col)]
    assert entries == [SurdScalar.of(1, 2)]


def test_raising_kills_highest_weight():
    for labels in ([4, 2, 1, 0], [1, 1, 0, 0], [3, 2, 2, 1, 0]):
        rep = Representation(HighestWeight.of(labels))
        top = unit(rep, rep.basis.highest)
        for k in range(2, rep.n + 1):
            assert np.allclose(rep.ef(k - 1, k) @ top, 0, atol=0)
        for j in range(1, rep.n + 1):
            assert np.allclose(rep.ef(0, j) @ top, 0, atol=0)


def test_ladder_e21_moves_one_quantum():
    p, n = 3, 3
    rep = Representation(HighestWeight.ladder(n, p))
    idx = chain.ladder_index(rep.basis, p)
    e21 = rep.e(2, 1).as_sums()
    for (theta, s), col in idx.items():
        target = (theta, (s[0] - 1, s[1] + 1) + s[2:])
        if s[0] == 0:
            assert not any(c == col for (_, c) in e21)
            continue
        row = idx[target]
        assert e21[(row, col)] == SurdScalar.of(1, s[0] * (s[1] + 1))


def test_fock_odd_action_closed_form():
    p, n = 4, 3
    rep = Representation(HighestWeight.fock(n, p))
    for k in range(1, n + 1):
        assert chain.fock_action(k, 0, p, rep.basis).exact_equal(rep.e(k, 0))


def test_gl11_doublet():
    a, b = Fraction(5, 2), Fraction(1, 2)
    rep = Representation(HighestWeight.of([a, b]))
    v = rep.basis.index(rep.basis.highest)
    w = 1 - v
    assert rep.e(0, 1).entries == {(v, w): SurdScalar.of(1, a + b)}
    assert rep.e(1, 0).entries == {(w, v): SurdScalar.of(1, a + b)}


def test_nonadjacent_even_matches_ladder():
    p, n = 2, 3
    rep = Representation(HighestWeight.ladder(n, p))
    closed = graded_commutator(chain.ladder_action(1, 0, p, rep.basis), chain.ladder_action(0, 3, p, rep.basis))
    assert rep.e(1, 3).exact_equal(closed)
    assert rep.e(3, 1).exact_equal(closed.dagger())


@pytest.mark.parametrize("labels", [[3, 1, 0], [2, 2, 1, 0], [1, 1, 0, 0]])
def test_anticommutator_and_weight_brackets(labels):
    rep = Representation(HighestWeight.of(labels))
    n = rep.n
    for j in range(1, n + 1):
        anti = graded_commutator(rep.e(j, 0), rep.e(0, j))
        target = exact_combination([(1, rep.e(0, 0).as_sums()), (1, rep.e(j, j).as_sums())])
        assert anti.as_sums() == target
        for k in range(n + 1):
            br = graded_commutator(rep.e(k, k), rep.e(0, j))
            assert br.exact_equal(expected_bracket(rep, (k, k), (0, j)))


@pytest.mark.parametrize(
    "labels",
    [[3, 1, 0], [1, 0, 0], [2, 1, 1], [4, 2, 1, 0], [1, 1, 0, 0], ["1/2", "3/2", "1/2"], [3, 2, 2, 1, 0]],
)
def test_star_and_all_brackets_exact(labels):
    rep = Representation(HighestWeight.of(labels))
    pairs = generator_pairs(rep.n, None if rep.n <= 3 else 60, __import__("random").Random(0))
    assert check_star(rep).passed
    result = check_brackets(rep, pairs)
    assert result.passed, result.detail


def test_defining_relations_odd():
    rep = Representation(HighestWeight.of([4, 2, 1, 0]))
    for j, k in itertools.product(range(1, 4), repeat=2):
        assert not graded_commutator(rep.e(j, 0), rep.e(k, 0)).as_sums()
        assert not graded_commutator(rep.e(0, j), rep.e(0, k)).as_sums()


def test_assemble_odd_examples():
    rep = Representation(HighestWeight.of([3, 1, 0]))
    m = assemble_odd([1, 0], rep).to_dense()
    assert np.array_equal(m, (rep.ef(0, 1) + rep.ef(1, 0)).toarray())
    assert not assemble_odd([0, 0], rep).entries
    alpha = np.array([0.3 + 1j, -2.0])
    M = odd_sparse(alpha, rep).toarray()
    assert np.array_equal(M, M.conj().T)
    cfg = chain.ChainConfig(2, c=0.4, mu=2.0, hbar=0.5)
    md = chain.mode_data(cfg)
    q = sum(
        np.sqrt(cfg.hbar / (cfg.mu * 2)) * md.gamma_j[j - 1] * np.exp(-2j * np.pi * j / 2) * rep.ef(0, j)
        for j in (1, 2)
    )
    q = q + q.conj().T
    assert np.allclose(chain.position_matrix(rep, cfg, 1).toarray(), q.toarray(), atol=1e-15)
    with pytest.raises(ValueError):
        odd_sparse([1.0], rep)


def test_triple_relations():
    for hw in (HighestWeight.fock(3, 4), HighestWeight.ladder(3, 2)):
        rep = Representation(hw)
        cfg = chain.ChainConfig(3, c=0.7, omega=1.3)
        md = chain.mode_data(cfg)
        minus, plus = chain.ladder_operators(rep, cfg)
        H = sum(w * (am @ ap + ap @ am) for w, am, ap in zip(md.omega_j, minus, plus))
        for k in range(3):
            for sign, a in ((-1, minus[k]), (1, plus[k])):
                lhs = (H @ a - a @ H).toarray()
                assert np.abs(lhs - sign * 2 * md.omega_j[k] * a.toarray()).max() <= 1e-10


def test_hamiltonian_diagonal_exact():
    beta = [Fraction(1, 3), Fraction(5, 7), Fraction(2)]
    for hw in (HighestWeight.of([4, 2, 1, 0]), HighestWeight.ladder(3, 3), HighestWeight.fock(3, 2)):
        rep = Representation(hw)
        terms = [(sum(beta), rep.e(0, 0).as_sums())] + [(b, rep.e(j, j).as_sums()) for j, b in enumerate(beta, 1)]
        H = exact_combination(terms)
        assert all(r == c for r, c in H)
        for i, pat in enumerate(rep.basis):
            value = H.get((i, i))
            expected = hamiltonian_energy(pat, beta)
            assert (value.terms.get(1, 0) if value else 0) == expected
            assert value is None or set(value.terms) == {1}


def test_hamiltonian_float_diagonal():
    cfg = chain.ChainConfig(3, c=0.2)
    rep = Representation(HighestWeight.fock(3, 3))
    md = chain.mode_data(cfg)
    H = chain.hamiltonian_matrix(rep, md.beta_j, cfg.hbar).toarray()
    assert np.count_nonzero(H - np.diag(np.diag(H))) == 0
    assert np.allclose(np.diag(H).real, chain.stationary_energies(rep.basis, md.beta_j, cfg.hbar), atol=1e-14)
    Q = chain.position_matrix(rep, cfg, 1).toarray()
    assert np.abs(H @ Q - Q @ H).max() > 1e-3


def test_nonunitary_rejected_and_negative_radicand_is_hard_error():
    with pytest.raises(NotUnitaryError):
        Representation(HighestWeight.of([0, 1, 0]))
    with pytest.raises(TranscriptionError):
        _combine_radicands(1, [Fraction(2), Fraction(-1, 3)], "test")


def test_export_roundtrip():
    rep = Representation(HighestWeight.of([3, 1, 0]))
    m = rep.e(0, 2)
    text = export_exact(m)
    again = parse_exact(text, rep.dim, (0, 2))
    assert again.exact_equal(m)
    coo = export_coo(m).splitlines()
    assert len(coo) == m.nnz()
    r, c, re, im = coo[0].split()
    assert float(re) == float(m.entries[(int(r), int(c))]) and float(im) == 0.0
    empty = GeneratorMatrix(3, {}, (0, 0))
    assert export_coo(empty) == "" and export_exact(empty) == ""
