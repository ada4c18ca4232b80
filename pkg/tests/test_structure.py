"""Tests for block decomposition: central projections, minimal projections,
matrix units, the block-diagonalizing basis change, and the
maximal-ideal/single-generator verification built on top of them."""

import numpy as np
import pytest

from cstarlab import (
    corner_dimension,
    generate_algebra,
    is_minimal_projection,
    minimal_projection_below,
    planted_block_algebra,
    socle,
    unit_partition_certificate,
    verify_dales_zelazko,
    wedderburn_decompose,
)
from cstarlab.instances import random_block_structure
from cstarlab.linalg import hs_norm
from cstarlab.structure import cluster_partition

E12 = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)


def diag_algebra(n):
    gens = [np.diag([1.0 if i == j else 0.0 for i in range(n)]) for j in range(n)]
    return generate_algebra(n, gens)


# ---------------------------------------------------------------------------
# eigenvalue clustering


def test_cluster_partition_oracle():
    vals = np.array([0.0, 1e-9, 0.5, 0.50000001, 2.0])
    groups = [list(g) for g in cluster_partition(vals)]
    assert groups == [[0, 1], [2, 3], [4]]


def test_cluster_partition_single_value():
    groups = cluster_partition(np.array([3.0]))
    assert len(groups) == 1


# ---------------------------------------------------------------------------
# frozen decomposition oracles


def test_full_matrix_algebra_is_one_block():
    a = generate_algebra(2, [E12])
    dec = wedderburn_decompose(a)
    assert dec.block_sizes == [2]
    assert dec.multiplicities == [1]
    assert dec.block_signature() == [(2, 1)]
    u = dec.basis_change
    np.testing.assert_allclose(u @ u.conj().T, np.eye(2), atol=1e-12)
    assert dec.residuals["block_form"] <= 1e-10


def test_diagonal_algebra_splits_into_lines():
    dec = wedderburn_decompose(diag_algebra(3))
    assert dec.block_sizes == [1, 1, 1]
    assert dec.multiplicities == [1, 1, 1]


def test_doubled_block_has_multiplicity_two():
    """{x (+) x : x in M2} is a single 2x2 block seen twice."""
    a = generate_algebra(4, [np.kron(np.eye(2), E12)])
    dec = wedderburn_decompose(a)
    assert dec.block_sizes == [2]
    assert dec.multiplicities == [2]
    # after the basis change every element is I_2 (x) alpha
    x = a.basis.matrices[0]
    u = dec.basis_change
    moved = u.conj().T @ x @ u
    alpha = moved[:2, :2]
    np.testing.assert_allclose(moved, np.kron(np.eye(2), alpha), atol=1e-8)


def test_block_form_matches_basis_change():
    planted = planted_block_algebra([3, 1], [2, 1], seed=42)
    dec = wedderburn_decompose(planted.algebra)
    x = planted.algebra.basis.matrices[1]
    u = dec.basis_change
    np.testing.assert_allclose(dec.block_form(x), u.conj().T @ x @ u, atol=1e-10)


# ---------------------------------------------------------------------------
# planted recovery


def test_planted_structures_recovered_exactly():
    rng = np.random.default_rng(314)
    for trial in range(15):
        sizes, mults = random_block_structure(rng)
        planted = planted_block_algebra(sizes, mults, seed=900 + trial)
        dec = wedderburn_decompose(planted.algebra, seed=trial)
        assert dec.block_signature() == planted.signature()
        # dimension identity: dim A = sum of squared block sizes
        assert sum(n * n for n in dec.block_sizes) == planted.algebra.dim
        assert dec.residuals["block_form"] <= 1e-8


def test_matrix_units_multiply_correctly():
    planted = planted_block_algebra([2, 2], [1, 2], seed=17)
    dec = wedderburn_decompose(planted.algebra)
    for units in dec.matrix_units:
        n = units.shape[0]
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    for l in range(n):
                        prod = units[i, j] @ units[k, l]
                        expect = units[i, l] if j == k else np.zeros_like(prod)
                        assert hs_norm(prod - expect) <= 1e-8
                # adjoint flips indices
                assert hs_norm(units[i, j].conj().T - units[j, i]) <= 1e-8


def test_central_projections_sum_to_unit():
    planted = planted_block_algebra([2, 1, 1], [1, 1, 2], seed=23)
    a = planted.algebra
    dec = wedderburn_decompose(a)
    total = sum(dec.central_projections)
    np.testing.assert_allclose(total, a.unit, atol=1e-8)
    for z in dec.central_projections:
        assert hs_norm(z @ z - z) <= 1e-8
        for b in a.basis.matrices:
            assert hs_norm(z @ b - b @ z) <= 1e-8


def test_decomposition_is_deterministic():
    planted = planted_block_algebra([2, 1], [1, 1], seed=3)
    d1 = wedderburn_decompose(planted.algebra, seed=5)
    d2 = wedderburn_decompose(planted.algebra, seed=5)
    assert np.array_equal(d1.basis_change, d2.basis_change)
    for a, b in zip(d1.central_projections, d2.central_projections):
        assert np.array_equal(a, b)


# ---------------------------------------------------------------------------
# corners, socle, unit partition


def test_corner_dimension_oracles():
    m2 = generate_algebra(2, [E12])
    assert corner_dimension(m2, np.diag([1.0, 0]), np.diag([0, 1.0])) == 1
    assert corner_dimension(m2, np.eye(2), np.eye(2)) == 4
    d3 = diag_algebra(3)
    assert corner_dimension(d3, np.diag([1.0, 0, 0]), np.diag([0, 1.0, 0])) == 0


def test_cross_block_corners_vanish():
    """Minimal projections in different blocks have zero corner; in the
    same block the corner is a line."""
    planted = planted_block_algebra([2, 1], [1, 1], seed=11)
    a = planted.algebra
    dec = wedderburn_decompose(a)
    diag_units = [units[i, i] for units in dec.matrix_units for i in range(units.shape[0])]
    block_of = [
        k for k, units in enumerate(dec.matrix_units) for _ in range(units.shape[0])
    ]
    for i, e in enumerate(diag_units):
        for j, f in enumerate(diag_units):
            expect = 1 if block_of[i] == block_of[j] else 0
            assert corner_dimension(a, e, f) == expect


def test_socle_is_whole_algebra():
    rng = np.random.default_rng(2)
    for trial in range(5):
        sizes, mults = random_block_structure(rng)
        planted = planted_block_algebra(sizes, mults, seed=1100 + trial)
        s = socle(planted.algebra)
        assert s.dim == planted.algebra.dim


def test_unit_partition_certificate():
    planted = planted_block_algebra([3, 1], [2, 1], seed=8)
    a = planted.algebra
    part = unit_partition_certificate(a)
    assert len(part.projections) == 4  # one minimal projection per block line
    assert part.residual <= 1e-8
    total = np.zeros_like(a.unit)
    for e, c in zip(part.projections, part.coefficients):
        assert is_minimal_projection(a, e)
        total = total + e @ c
    np.testing.assert_allclose(total, a.unit, atol=1e-8)


def test_minimal_projection_below_stays_under_start():
    planted = planted_block_algebra([2, 2], [1, 1], seed=31)
    a = planted.algebra
    dec = wedderburn_decompose(a)
    start = dec.central_projections[0]
    e = minimal_projection_below(a, start, seed=9)
    assert is_minimal_projection(a, e)
    assert hs_norm(start @ e - e) <= 1e-8


# ---------------------------------------------------------------------------
# maximal-ideal verification sweep


def test_verify_single_generation_of_maximal_ideals_m2():
    report = verify_dales_zelazko(generate_algebra(2, [E12]), trials=4, seed=2)
    assert report.all_ok
    assert report.block_sizes == [2]
    assert report.dimension_identity_ok
    assert len(report.trials) == 4
    for t in report.trials:
        assert t.ok
        assert t.is_maximal
        assert t.single_generation
        assert t.support_agreement <= 1e-8


def test_verify_single_generation_scalar_algebra():
    """The scalars have only the zero ideal; the sweep must treat its empty
    certificate as valid rather than inventing a proper ideal."""
    scalars = generate_algebra(1, [np.eye(1, dtype=complex)])
    report = verify_dales_zelazko(scalars, trials=2, seed=0)
    assert report.all_ok
    assert report.block_sizes == [1]


def test_verify_single_generation_planted():
    rng = np.random.default_rng(66)
    for trial in range(4):
        sizes, mults = random_block_structure(rng)
        planted = planted_block_algebra(sizes, mults, seed=1300 + trial)
        report = verify_dales_zelazko(planted.algebra, trials=3, seed=trial)
        assert report.all_ok
        assert sorted(report.block_sizes, reverse=True) == sorted(
            [s for s, _ in planted.signature()], reverse=True
        )
