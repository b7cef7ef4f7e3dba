import random
import warnings
from fractions import Fraction
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gl1n import chain
from gl1n.gz import HighestWeight, NotUnitaryError, gl_n_dimension
from gl1n.matrices import Representation, odd_sparse
from gl1n.odd import (
    EBasis,
    EigenvectorFallbackWarning,
    allowed_middle,
    branch,
    build_rotation,
    cluster_eigenvalues,
    eigenvectors,
    highest_weight_residual,
    momentum_variant,
    multiplicity_exponent,
    normalization_identity,
    oracle_diagonalize,
    rotated_highest_weight,
    same_spectrum,
    spectrum,
    telescoping_identity_check,
    telescoping_lhs,
)
from gl1n.verify import eigen_quality

REPS = [
    [3, 1, 0],
    [1, 0, 0],
    [2, 1, 1],
    [4, 2, 1, 0],
    [1, 1, 0, 0],
    [3, 3, 1, 0],
    ["1/2", "3/2", "1/2"],
    [2, 1],
    [0, 0, 0],
    [5, 0, 0, 0],
    [1, 2, 0, 0],
]


def rand_alpha(n, rng):
    return rng.normal(size=n) + 1j * rng.normal(size=n)


def test_rotation_n2_example():
    g1, g2, r = 0.7, 1.3, 1
    gamma = g1**2 + g2**2
    alpha = np.array([g1 * np.exp(-2j * np.pi * r / 2), g2 * np.exp(-4j * np.pi * r / 2)])
    U = build_rotation(alpha).U
    expected = np.array([g2 * np.exp(2j * np.pi * r / 2), -g1 * np.exp(4j * np.pi * r / 2)]) / np.sqrt(gamma)
    assert np.allclose(U[0], expected, atol=1e-15)
    assert np.allclose(U[1], alpha.conj() / np.sqrt(gamma), atol=1e-15)
    assert np.allclose(U @ U.conj().T, np.eye(2), atol=1e-12)


def test_rotation_identity_for_last_unit_vector():
    for n in (1, 2, 4):
        alpha = np.zeros(n)
        alpha[-1] = 3.0
        assert np.array_equal(build_rotation(alpha).U, np.eye(n))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_rotation_unitary_hessenberg(n, seed):
    rng = np.random.default_rng(seed)
    alpha = rand_alpha(n, rng)
    if seed % 3 == 0 and n > 1:
        alpha[rng.integers(n)] = 0
    rot = build_rotation(alpha)
    U = rot.U
    assert np.abs(U @ U.conj().T - np.eye(n)).max() <= 1e-12
    assert np.all(np.tril(U.T, -2) == 0)  # U[j, l] = 0 for l > j + 1
    assert np.allclose(rot.coefficients, alpha.conj() / np.linalg.norm(alpha), atol=1e-15)
    assert rot.norm == pytest.approx(np.linalg.norm(alpha))


def test_rotation_rejects_zero():
    with pytest.raises(ValueError):
        build_rotation([0, 0])


@pytest.mark.parametrize("labels", [[3, 1, 0], [4, 2, 1, 0], [1, 1, 0, 0]])
def test_ebasis_relations(labels):
    rep = Representation(HighestWeight.of(labels))
    n = rep.n
    alpha = rand_alpha(n, np.random.default_rng(3))
    rot = build_rotation(alpha)
    E = EBasis(rep, rot)
    for j in range(1, n + 1):
        for k in range(1, n + 1):
            assert abs(E(j, 0) @ E(k, 0) + E(k, 0) @ E(j, 0)).max() <= 1e-10
            assert abs(E(0, j) @ E(0, k) + E(0, k) @ E(0, j)).max() <= 1e-10
        anti = E(j, 0) @ E(0, j) + E(0, j) @ E(j, 0)
        target = rep.ef(0, 0).copy()
        for l in range(1, n + 1):
            for k in range(1, n + 1):
                target = target + rot.U[j - 1, l - 1] * np.conj(rot.U[j - 1, k - 1]) * rep.ef(l, k)
        assert abs(anti - target).max() <= 1e-10
    M = odd_sparse(alpha, rep)
    assert abs(M - rot.norm * (E(0, n) + E(n, 0))).max() <= 1e-12


@pytest.mark.parametrize("n,p", [(2, 3), (3, 5), (4, 4)])
def test_branch_fock_typical(n, p):
    comps = branch(HighestWeight.fock(n, p))
    assert len(comps) == n
    by_k = {}
    for c in comps:
        K = int(sum(c.gln1_label))
        assert c.gln1_label == tuple([1] * K + [0] * (n - 1 - K))
        assert c.N == 1 and not c.singlet
        assert c.gln1_dim == comb(n - 1, K)
        by_k[K] = c.k_value
    assert by_k == {K: p - K for K in range(n)}


@pytest.mark.parametrize("n,p", [(2, 2), (3, 3), (4, 2)])
def test_branch_ladder(n, p):
    comps = branch(HighestWeight.ladder(n, p))
    singlets = [c for c in comps if c.singlet]
    assert len(singlets) == 1
    s = singlets[0]
    assert s.gl1_weight == (0, 0) and s.gln1_label == tuple([p] + [0] * (n - 2))
    typical = sorted(c.k_value for c in comps if not c.singlet)
    assert typical == [Fraction(p - K) for K in range(p - 1, -1, -1)]


@pytest.mark.parametrize("labels", REPS)
def test_multiplicity_law(labels):
    hw = HighestWeight.of(labels)
    rep = Representation(hw)
    total = 0
    for c in branch(hw):
        # |A| = 2^N, checked against the explicit theta enumeration
        assert len(allowed_middle(hw, c.gln1_label)) == 2**c.N
        assert multiplicity_exponent(hw, c.gln1_label) == c.N
        total += c.dimension
    assert total == rep.dim


@pytest.mark.parametrize("labels", REPS)
def test_k_values_step_by_one(labels):
    hw = HighestWeight.of(labels)
    ks = sorted({c.k_value for c in branch(hw)})
    assert all(b - a == 1 for a, b in zip(ks, ks[1:]))
    assert all(k >= 0 for k in ks)
    if hw.n > 1 and any(c.singlet for c in branch(hw)):
        assert ks[0] == 0


def test_spectrum_examples():
    cfg = chain.ChainConfig(3, c=0.3)
    op = chain.position_operator(cfg, 2)
    rep = spectrum(HighestWeight.fock(3, 5), op.alpha)
    assert [(lv.multiplicity, lv.k) for lv in rep.levels] == [(1, 5), (2, 4), (1, 3), (1, 3), (2, 4), (1, 5)]
    for lv in rep.levels:
        assert abs(abs(lv.value) - op.scale * np.sqrt(float(lv.k))) <= 1e-12
    ladder = spectrum(HighestWeight.ladder(4, 3), op.alpha[:1].tolist() * 4)
    zero = [lv for lv in ladder.levels if lv.value == 0]
    assert zero[0].multiplicity == comb(4 - 2 + 3, 4 - 2)
    assert len(ladder.levels) == 2 * 3 + 1
    for n, p in [(3, 1), (3, 2), (4, 2), (5, 3)]:
        atyp = spectrum(HighestWeight.fock(n, p), [1] * n)
        assert [lv.multiplicity for lv in atyp.levels if lv.value == 0] == [comb(n - 1, p)]


def test_spectrum_json_shape():
    rep = spectrum(HighestWeight.of([2, 1]), [2.0])
    assert rep.to_json() == {
        "scale": 2.0,
        "levels": [{"value": -2 * np.sqrt(3), "multiplicity": 1}, {"value": 2 * np.sqrt(3), "multiplicity": 1}],
    }


def test_spectrum_rejects_nonunitary():
    with pytest.raises(NotUnitaryError):
        spectrum(HighestWeight.of([0, 1, 0]), [1, 1])


@pytest.mark.parametrize("labels", REPS)
def test_spectrum_vs_oracle(labels):
    hw = HighestWeight.of(labels)
    rep = Representation(hw)
    rng = np.random.default_rng(11)
    for _ in range(3):
        alpha = rand_alpha(hw.n, rng)
        scale = np.linalg.norm(alpha)
        oracle = oracle_diagonalize(odd_sparse(alpha, rep), scale=scale).report
        assert same_spectrum(spectrum(hw, alpha), oracle, 1e-8 * scale)


def test_spectrum_depends_only_on_norm():
    hw = HighestWeight.of([4, 2, 1, 0])
    rep = Representation(hw)
    rng = np.random.default_rng(5)
    a = rand_alpha(3, rng)
    b = rand_alpha(3, rng)
    b *= np.linalg.norm(a) / np.linalg.norm(b)
    sa, sb = spectrum(hw, a), spectrum(hw, b)
    assert same_spectrum(sa, sb, 1e-12)
    va = np.column_stack([v.coeffs for v in eigenvectors(hw, a, rep=rep).vectors])
    vb = np.column_stack([v.coeffs for v in eigenvectors(hw, b, rep=rep).vectors])
    overlap = np.abs(va.conj().T @ vb)
    assert not np.allclose(overlap, np.round(overlap), atol=1e-6)


@pytest.mark.parametrize("labels", REPS)
def test_rotated_highest_weight(labels):
    hw = HighestWeight.of(labels)
    rep = Representation(hw)
    rng = np.random.default_rng(2)
    for alpha in [rand_alpha(hw.n, rng) for _ in range(3)]:
        rot = build_rotation(alpha)
        vec = rotated_highest_weight(hw, rot, rep=rep).coeffs
        assert highest_weight_residual(EBasis(rep, rot), vec) <= 1e-10
        assert abs(np.linalg.norm(vec) - 1) <= 1e-12


@pytest.mark.parametrize("alpha", [(0, 0, 1), (1, 0, 0), (0, 1, 0), (1, 0, 1j), (0, 2, 1)])
def test_rotated_highest_weight_degenerate_alpha(alpha):
    hw = HighestWeight.of([4, 2, 1, 0])
    rep = Representation(hw)
    rot = build_rotation(alpha)
    vec = rotated_highest_weight(hw, rot, rep=rep).coeffs
    assert highest_weight_residual(EBasis(rep, rot), vec) <= 1e-10
    assert abs(np.linalg.norm(vec) - 1) <= 1e-12


def test_fock_highest_weight_unrotated():
    rep = Representation(HighestWeight.fock(3, 4))
    rot = build_rotation(chain.position_operator(chain.ChainConfig(3, c=0.5), 1).alpha)
    vec = rotated_highest_weight(rep.hw, rot, rep=rep).coeffs
    top = rep.basis.index(rep.basis.highest)
    assert abs(abs(vec[top]) - 1) <= 1e-12


@pytest.mark.parametrize("n,p,r", [(2, 2, 1), (3, 3, 2), (4, 2, 3)])
def test_ladder_highest_weight_closed_form(n, p, r):
    cfg = chain.ChainConfig(n, c=0.2, omega=0.9)
    rep = Representation(HighestWeight.ladder(n, p))
    closed = chain.ladder_highest_weight(p, cfg, r, rep.basis)
    generic = rotated_highest_weight(rep.hw, build_rotation(chain.position_operator(cfg, r).alpha), rep=rep).coeffs
    assert abs(abs(np.vdot(closed, generic)) - 1) <= 1e-12
    assert abs(np.linalg.norm(closed) - 1) <= 1e-12


@pytest.mark.parametrize("labels", [[4, 2, 1, 0], [3, 3, 1, 0, 0], [1, 4, 0, 0], [5, 3, 1], [2, 2, 2, 0]])
def test_normalization_identity_exact(labels):
    hw = HighestWeight.of(labels)
    rnd = random.Random(1)
    for _ in range(5):
        w = [Fraction(rnd.randint(1, 20), rnd.randint(1, 20)) for _ in range(hw.n)]
        total, cal_n = normalization_identity(hw, w)
        assert total == cal_n


@pytest.mark.parametrize("labels", REPS)
def test_eigenvectors(labels):
    hw = HighestWeight.of(labels)
    rep = Representation(hw)
    rng = np.random.default_rng(7)
    for _ in range(2):
        alpha = rand_alpha(hw.n, rng)
        with warnings.catch_warnings():
            warnings.simplefilter("error", EigenvectorFallbackWarning)
            sys = eigenvectors(hw, alpha, rep=rep)
        assert not sys.fallback and len(sys.vectors) == rep.dim
        res, gram = eigen_quality(odd_sparse(alpha, rep), sys.vectors)
        assert res <= 1e-10 and gram <= 1e-10
        got = sorted(v.eigenvalue for v in sys.vectors)
        assert np.allclose(got, spectrum(hw, alpha).values(), atol=1e-12)


@pytest.mark.parametrize("labels", [[3, 1, 0], [4, 2, 1, 0], [1, 1, 0, 0]])
def test_momentum_variant(labels):
    hw = HighestWeight.of(labels)
    rep = Representation(hw)
    c = rand_alpha(hw.n, np.random.default_rng(9))
    sys = momentum_variant(hw, c, rep=rep)
    M = odd_sparse(1j * c, rep)
    res, gram = eigen_quality(M, sys.vectors)
    assert res <= 1e-10 and gram <= 1e-10
    assert same_spectrum(sys.spectrum, spectrum(hw, c), 0)
    q = eigenvectors(hw, c, rep=rep).vectors
    # (v + i w)/sqrt2 pairs with -lambda where (v + w)/sqrt2 had +lambda
    for vq, vp in zip(q, sys.vectors):
        if vq.eigenvalue:
            assert vp.eigenvalue == pytest.approx(-vq.eigenvalue)


def test_oracle_examples():
    k = 3.5
    res = oracle_diagonalize(np.array([[0, np.sqrt(k)], [np.sqrt(k), 0]]))
    assert np.allclose(res.values, [-np.sqrt(k), np.sqrt(k)])
    zero = oracle_diagonalize(np.zeros((4, 4)))
    assert [(lv.value, lv.multiplicity) for lv in zero.report.levels] == [(0.0, 4)]
    with pytest.raises(ValueError):
        oracle_diagonalize(np.array([[0, 1], [2, 0]]))
    levels = cluster_eigenvalues(np.array([1.0, 1.0 + 1e-12, -1.0]))
    assert [lv.multiplicity for lv in levels] == [1, 2]


def test_telescoping_examples():
    assert telescoping_lhs([5], [2], 1) == 3
    assert telescoping_lhs([3, 5], [1, 2], 2) == 3
    assert telescoping_identity_check([3, 5], [1, 2], 2)
    with pytest.raises(ZeroDivisionError):
        telescoping_lhs([3, 5], [1, 3], 2)


@settings(max_examples=200, deadline=None)
@given(
    st.integers(1, 8),
    st.lists(st.fractions(min_value=-20, max_value=20, max_denominator=9), min_size=16, max_size=16),
)
def test_telescoping_random(j, vals):
    x, y = vals[:8], vals[8:]
    try:
        assert telescoping_identity_check(x, y, j)
    except ZeroDivisionError:
        pass
