"""Tests for ternary rings of operators (spaces closed under x y* z):
block classification up to unitaries, the submodule <-> right-ideal
correspondence, maximality transfer, and finite-generation certificates."""

import numpy as np
import pytest

from cstarlab import (
    classify_tro,
    finite_generation_certificate,
    generate_right_ideal,
    generate_submodule,
    generate_tro,
    is_maximal_right_ideal,
    is_maximal_submodule,
    linking_algebra,
    minimal_projection_below,
    planted_block_tro,
    submodule_ideal_roundtrip,
    tro_from_span,
    wedderburn_decompose,
)
from cstarlab.errors import (
    ClosureViolation,
    MembershipViolation,
    NotProper,
    ZeroSubmodule,
)
from cstarlab.instances import random_tro_blocks
from cstarlab.linalg import hs_norm

E11 = np.diag([1.0, 0.0]).astype(complex)
E12 = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
E22 = np.diag([0.0, 1.0]).astype(complex)


def sample_member(tro, rng):
    coeff = rng.standard_normal(tro.dim) + 1j * rng.standard_normal(tro.dim)
    return np.einsum("a,aij->ij", coeff, tro.basis.matrices)


# ---------------------------------------------------------------------------
# construction and closure


def test_row_space_is_single_rectangular_block():
    t = tro_from_span([np.array([[1.0, 0.0]]), np.array([[0.0, 1.0]])])
    assert t.rows == 1 and t.cols == 2 and t.dim == 2
    assert classify_tro(t).blocks == [(1, 2)]


def test_diagonal_tro_splits():
    t = tro_from_span([E11, E22])
    assert classify_tro(t).blocks == [(1, 1), (1, 1)]


def test_full_matrix_tro():
    t = generate_tro(2, 2, [E11, E12, E12.conj().T, E22])
    assert t.dim == 4
    assert classify_tro(t).blocks == [(2, 2)]


def test_non_closed_span_rejected():
    with pytest.raises(ClosureViolation):
        tro_from_span([E11, E12 + E12.conj().T])


def test_generate_tro_closes_under_triple_products():
    rng = np.random.default_rng(12)
    g = rng.standard_normal((2, 3)) + 1j * rng.standard_normal((2, 3))
    t = generate_tro(2, 3, [g])
    x, y, z = (sample_member(t, rng) for _ in range(3))
    assert t.contains(x @ y.conj().T @ z)


def test_associated_algebras_act_on_the_space():
    p = planted_block_tro([(2, 2)], seed=1)
    t = p.tro
    rng = np.random.default_rng(0)
    z = sample_member(t, rng)
    left = t.left_algebra.basis.matrices[0]
    right = t.right_algebra.basis.matrices[0]
    assert t.contains(left @ z)
    assert t.contains(z @ right)


# ---------------------------------------------------------------------------
# classification


def test_planted_tro_recovered():
    p = planted_block_tro([(2, 3), (1, 1)], seed=4)
    cls = classify_tro(p.tro)
    assert cls.blocks == [(2, 3), (1, 1)]
    assert cls.total_dim() == p.tro.dim == 7
    assert cls.residuals["ternary_morphism"] <= 1e-10


def test_classification_is_a_ternary_morphism():
    """apply() multiplies correctly through triple products block by block."""
    rng = np.random.default_rng(29)
    for trial in range(8):
        blocks = random_tro_blocks(rng)
        p = planted_block_tro(blocks, seed=1500 + trial)
        cls = classify_tro(p.tro, seed=trial)
        assert sorted(cls.blocks) == sorted(blocks)
        x, y, z = (sample_member(p.tro, rng) for _ in range(3))
        lhs = cls.apply(x @ y.conj().T @ z)
        tx, ty, tz = cls.apply(x), cls.apply(y), cls.apply(z)
        for l, a, b, c in zip(lhs, tx, ty, tz):
            assert hs_norm(l - a @ b.conj().T @ c) <= 1e-8 * max(
                1.0, hs_norm(a) * hs_norm(b) * hs_norm(c)
            )


def test_classification_isometries_are_isometric():
    p = planted_block_tro([(2, 2), (1, 3)], seed=9)
    cls = classify_tro(p.tro)
    for (m, n), (u, v) in zip(cls.blocks, cls.isometries):
        np.testing.assert_allclose(u.conj().T @ u, np.eye(m), atol=1e-8)
        np.testing.assert_allclose(v.conj().T @ v, np.eye(n), atol=1e-8)


def test_classification_surjective_on_blocks():
    """Every target matrix is hit: pulling the standard units back through
    the isometries lands inside the TRO."""
    p = planted_block_tro([(2, 2), (1, 2)], seed=14)
    cls = classify_tro(p.tro)
    for (m, n), (u, v) in zip(cls.blocks, cls.isometries):
        for i in range(m):
            for j in range(n):
                unit = np.zeros((m, n), dtype=complex)
                unit[i, j] = 1.0
                assert p.tro.contains(u @ unit @ v.conj().T)


def test_linking_algebra_blocks():
    """The corner embedding of Z into (m+n)-square matrices generates one
    block of size m_k + n_k per TRO block."""
    p = planted_block_tro([(2, 3), (1, 1)], seed=4)
    link = linking_algebra(p.tro)
    assert link.ambient_dim == 7  # (2+3) rows vs (1+1) appended… ambient is m+n
    dec = wedderburn_decompose(link)
    assert dec.block_signature() == [(5, 1), (2, 1)]
    assert link.dim == 25 + 4


# ---------------------------------------------------------------------------
# submodules and the ideal correspondence


def test_generic_element_generates_everything():
    p = planted_block_tro([(2, 2), (1, 1)], seed=6)
    rng = np.random.default_rng(3)
    w = generate_submodule(p.tro, [sample_member(p.tro, rng)])
    assert w.dim == p.tro.dim


def test_submodule_requires_membership():
    # two 1x1 blocks span only a 2-dimensional slice of the 2x2 matrices
    p = planted_block_tro([(1, 1), (1, 1)], seed=2)
    assert p.tro.dim == 2
    with pytest.raises(MembershipViolation):
        generate_submodule(p.tro, [np.ones((2, 2), dtype=complex)])


def test_submodule_ideal_roundtrip():
    """W -> J = span(W Z*) -> J Z recovers W, and ideals survive the other
    direction; both distances are reported."""
    rng = np.random.default_rng(47)
    for trial in range(8):
        blocks = random_tro_blocks(rng)
        p = planted_block_tro(blocks, seed=1700 + trial)
        n_gens = int(rng.integers(1, 3))
        gens = [sample_member(p.tro, rng) for _ in range(n_gens)]
        w = generate_submodule(p.tro, gens)
        ideal, report = submodule_ideal_roundtrip(p.tro, w)
        assert report["ok"]
        assert report["module_roundtrip"] <= 1e-8
        assert report["ideal_roundtrip"] <= 1e-8
        # the ideal lives in the left algebra
        for x in ideal.basis.matrices:
            assert p.tro.left_algebra.contains(x)


def test_maximality_transfers_both_ways():
    p = planted_block_tro([(2, 2), (1, 1)], seed=6)
    z = p.tro
    left = z.left_algebra
    e = minimal_projection_below(left, left.unit, seed=1)
    j = generate_right_ideal(left, [left.unit - e])
    assert is_maximal_right_ideal(left, j)
    w_gens = [np.asarray(x) @ zb for x in j.basis.matrices for zb in z.basis.matrices]
    w = generate_submodule(z, w_gens)
    assert is_maximal_submodule(z, w)
    # a strictly smaller submodule is not maximal
    small = generate_submodule(z, [w.basis.matrices[0]])
    if small.dim < w.dim:
        assert not is_maximal_submodule(z, small)


def test_whole_module_is_not_proper():
    p = planted_block_tro([(1, 2)], seed=5)
    whole = generate_submodule(p.tro, list(p.tro.basis.matrices))
    with pytest.raises(NotProper):
        is_maximal_submodule(p.tro, whole)


def test_zero_submodule_maximal_only_for_one_block_lines():
    """{0} is maximal exactly when the zero ideal is maximal in the left
    algebra, i.e. the left algebra is the scalars."""
    single = planted_block_tro([(1, 3)], seed=7)
    zero = generate_submodule(single.tro, [])
    assert is_maximal_submodule(single.tro, zero)
    double = planted_block_tro([(1, 1), (1, 1)], seed=7)
    zero2 = generate_submodule(double.tro, [])
    assert not is_maximal_submodule(double.tro, zero2)


# ---------------------------------------------------------------------------
# finite generation certificates


def test_finite_generation_certificate_fields():
    p = planted_block_tro([(2, 2), (1, 1)], seed=6)
    rng = np.random.default_rng(3)
    w = generate_submodule(p.tro, [sample_member(p.tro, rng)])
    cert = finite_generation_certificate(w)
    assert len(cert.generators) == w.dim
    e = cert.projection
    assert hs_norm(e @ e - e) <= 1e-8
    assert hs_norm(e - e.conj().T) <= 1e-8
    assert max(cert.residuals.values()) <= 1e-8
    # e acts as the identity on the submodule from the left
    for x in w.basis.matrices:
        assert hs_norm(e @ x - x) <= 1e-8


def test_finite_generation_random_submodules():
    rng = np.random.default_rng(58)
    for trial in range(8):
        blocks = random_tro_blocks(rng)
        p = planted_block_tro(blocks, seed=1900 + trial)
        gens = [sample_member(p.tro, rng)]
        w = generate_submodule(p.tro, gens)
        cert = finite_generation_certificate(w)
        regen = generate_submodule(p.tro, cert.generators)
        assert regen.dim == w.dim
        assert regen.basis.equals(w.basis, tol=1e-8)


def test_zero_submodule_has_no_certificate():
    p = planted_block_tro([(1, 1)], seed=0)
    zero = generate_submodule(p.tro, [])
    with pytest.raises(ZeroSubmodule):
        finite_generation_certificate(zero)
