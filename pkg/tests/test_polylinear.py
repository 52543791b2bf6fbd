"""Pointwise structure tests: normal forms, adapted metrics, deformations.

Oracles: scipy Schur pairing for the single-form case, numpy matrix_rank
for kernel dimensions, and an independent block-orthogonality check for
the metric interpolation path.
"""

import numpy as np
import pytest
import scipy.linalg

from selfdual import exterior as ext
from selfdual import polylinear as pl
from selfdual.exterior import Multivector, NotPositiveDefinite
from selfdual.polylinear import (
    Degenerate, GeometryError, NotCompatible, NotPolysymplectic,
    PolyStructure, deform, dualizing_form, dualizing_form_from_basis,
    interpolate_block_compatible, is_block_compatible, is_compatible, kernel,
    metric_data, metric_from_data, normal_form, pulled_back, rotate_structure,
    standard_basis,
)


def well_conditioned(rng, d, spread=2.0):
    q1 = np.linalg.qr(rng.normal(size=(d, d)))[0]
    q2 = np.linalg.qr(rng.normal(size=(d, d)))[0]
    return q1 @ np.diag(rng.uniform(1.0 / spread, spread, size=d)) @ q2


def schur_pairing_oracle(A):
    # independent single-form normal basis via the real Schur form
    T, Q = scipy.linalg.schur(A, output="real")
    vs, ws = [], []
    i = 0
    while i < A.shape[0]:
        if i + 1 < A.shape[0] and abs(T[i, i + 1]) > 1e-10:
            vs.append(Q[:, i])
            ws.append(Q[:, i + 1] / T[i, i + 1])
            i += 2
        else:
            i += 1
    return np.column_stack(vs + ws)


# ---------------------------------------------------------------------------
# kernel


def test_kernel_single_pair_form():
    om = Multivector.basis(3, [0, 1])
    K = kernel(om)
    assert K.shape == (3, 1)
    assert abs(abs(K[2, 0]) - 1.0) < 1e-12


def test_kernel_of_canonical_first_form():
    P = normal_form(2, 2)
    K = kernel(P.omegas[0])
    assert K.shape == (6, 2)
    # kernel of the first form is the second fibre block
    assert np.max(np.abs(K[:4, :])) < 1e-12


def test_kernel_dimension_matches_rank_oracle():
    rng = np.random.default_rng(11)
    for n, s in [(1, 2), (2, 2), (2, 3), (3, 2)]:
        P = pulled_back(normal_form(n, s), well_conditioned(rng, n * (s + 1)))
        for A in P.matrices:
            K = kernel(A)
            assert K.shape[1] == A.shape[0] - np.linalg.matrix_rank(A, tol=1e-8)
            assert K.shape[1] == n * (s - 1)
            assert np.max(np.abs(A @ K)) < 1e-8


# ---------------------------------------------------------------------------
# standard_basis


def test_standard_basis_identity_on_normal_form():
    P = normal_form(2, 2)
    sb = standard_basis(P)
    np.testing.assert_allclose(sb.matrix, np.eye(6), atol=1e-10)
    assert sb.orthonormal


def test_standard_basis_on_random_pullbacks():
    rng = np.random.default_rng(12)
    count = 0
    for _ in range(100):
        n = int(rng.integers(1, 4))
        s = int(rng.integers(1, 4))
        d = n * (s + 1)
        P = pulled_back(normal_form(n, s, metric=False), well_conditioned(rng, d))
        sb = standard_basis(P)
        assert sb.normal_form_residual(P) < 1e-9
        count += 1
    assert count == 100


def test_standard_basis_equal_forms_rejected():
    P = normal_form(1, 2)
    bad = PolyStructure(1, 2, [P.matrices[0], P.matrices[0]])
    with pytest.raises(NotPolysymplectic):
        standard_basis(bad)


def test_standard_basis_nonisotropic_kernel_block_rejected():
    # second form's kernel fails to be isotropic for the first form
    n, s = 2, 2
    P = normal_form(n, s, metric=False)
    A = P.matrices[0].copy()
    A[2, 3] += 1.0
    A[3, 2] -= 1.0
    bad = PolyStructure(n, s, [A, P.matrices[1]])
    with pytest.raises(Degenerate):
        standard_basis(bad)


def test_single_form_agrees_with_schur_oracle():
    rng = np.random.default_rng(13)
    for n in (1, 2, 3):
        P = pulled_back(normal_form(n, 1, metric=False), well_conditioned(rng, 2 * n))
        A = P.matrices[0]
        sb = standard_basis(P)
        C = pl._canonical_matrix(n, 1, 1)
        assert np.max(np.abs(sb.matrix.T @ A @ sb.matrix - C)) < 1e-9
        oracle = schur_pairing_oracle(A)
        assert np.max(np.abs(oracle.T @ A @ oracle - C)) < 1e-9
        assert np.linalg.matrix_rank(A, tol=1e-8) == 2 * n


# ---------------------------------------------------------------------------
# is_compatible


def test_compatible_normal_form_euclidean():
    res = is_compatible(normal_form(2, 2))
    assert res.compatible and res.basis.orthonormal
    assert res.residual < 1e-12


def test_incompatible_scaled_fibre_block():
    P = normal_form(1, 2).with_metric(np.diag([1.0, 1.0, 4.0]))
    res = is_compatible(P)
    assert not res.compatible


def test_compatible_random_pullback():
    rng = np.random.default_rng(14)
    for _ in range(20):
        n = int(rng.integers(1, 4))
        P = pulled_back(normal_form(n, 2), well_conditioned(rng, 3 * n))
        res = is_compatible(P)
        assert res.compatible
        B = res.basis.matrix
        assert np.max(np.abs(B.T @ P.metric @ B - np.eye(3 * n))) < 1e-9


def test_compatible_requires_metric():
    with pytest.raises(ValueError):
        is_compatible(normal_form(1, 2, metric=False))


# ---------------------------------------------------------------------------
# dualizing_form


def test_dualizing_form_normal_form_n1():
    out = dualizing_form(normal_form(1, 2))
    want = Multivector.basis(3, [1, 2])
    assert (out - want).norm() < 1e-12


def test_dualizing_form_normal_form_n2():
    out = dualizing_form(normal_form(2, 2))
    want = Multivector.basis(6, [2, 4]) + Multivector.basis(6, [3, 5])
    assert (out - want).norm() < 1e-12


def test_dualizing_form_witness_independence():
    rng = np.random.default_rng(15)
    n = 2
    P = pulled_back(normal_form(n, 2), well_conditioned(rng, 3 * n))
    res = is_compatible(P)
    base = dualizing_form_from_basis(res.basis)
    for _ in range(100):
        R = np.linalg.qr(rng.normal(size=(n, n)))[0]
        block = scipy.linalg.block_diag(R, R, R)
        rotated = pl.StandardBasis(n, 2, res.basis.matrix @ block, orthonormal=True)
        out = dualizing_form_from_basis(rotated)
        assert (out - base).norm() < 1e-10


def test_dualizing_form_requires_compatibility():
    P = normal_form(1, 2).with_metric(np.diag([1.0, 1.0, 4.0]))
    with pytest.raises(NotCompatible):
        dualizing_form(P)
    with pytest.raises(ValueError):
        dualizing_form(normal_form(1, 3))


# ---------------------------------------------------------------------------
# deform


def test_deform_lambda_identity():
    P = normal_form(2, 2)
    Q = deform(P, "lambda", 1.0)
    for A, B in zip(P.matrices, Q.matrices):
        assert np.max(np.abs(A - B)) < 1e-14
    np.testing.assert_allclose(Q.metric, P.metric, atol=1e-14)


def test_deform_lambda_scales_coframe_inner_products():
    rng = np.random.default_rng(16)
    P = pulled_back(normal_form(2, 2), well_conditioned(rng, 6))
    a = Multivector.covector(rng.normal(size=6))
    b = Multivector.covector(rng.normal(size=6))
    for t in (0.5, 2.0, 7.0):
        Q = deform(P, "lambda", t)
        assert is_compatible(Q).compatible
        lhs = ext.inner(a, b, np.linalg.inv(Q.metric))
        rhs = ext.inner(a, b, np.linalg.inv(P.metric)) / t
        assert abs(lhs - rhs) < 1e-9 * max(1.0, abs(rhs))


@pytest.mark.parametrize("kind", ["alpha", "beta"])
def test_deform_keeps_compatibility_and_dualizing_form(kind):
    rng = np.random.default_rng(17)
    P = pulled_back(normal_form(2, 2), well_conditioned(rng, 6))
    base = dualizing_form(P)
    for t in (0.5, 2.0, 7.0):
        Q = deform(P, kind, t)
        assert is_compatible(Q).compatible
        assert (dualizing_form(Q) - base).norm() < 1e-10


def test_deform_alpha_inverse_round_trip():
    rng = np.random.default_rng(18)
    P = pulled_back(normal_form(1, 2), well_conditioned(rng, 3))
    for t in (0.5, 3.0):
        Q = deform(deform(P, "alpha", t), "alpha", 1.0 / t)
        for A, B in zip(P.matrices, Q.matrices):
            assert np.max(np.abs(A - B)) < 1e-12
        assert np.max(np.abs(Q.metric - P.metric)) < 1e-12


def test_deform_rejects_nonpositive_t():
    with pytest.raises(ValueError):
        deform(normal_form(1, 2), "alpha", 0.0)
    with pytest.raises(ValueError):
        deform(normal_form(1, 2), "nope", 1.0)


# ---------------------------------------------------------------------------
# rotate_structure


@pytest.mark.parametrize("mode", ["D1", "2D"])
def test_rotate_structure_stays_compatible(mode):
    rng = np.random.default_rng(19)
    for n in (1, 2):
        P = pulled_back(normal_form(n, 2), well_conditioned(rng, 3 * n))
        Q = rotate_structure(P, mode)
        assert is_compatible(Q).compatible


def test_rotate_structure_normal_form_n1_forms():
    P = normal_form(1, 2)
    Q = rotate_structure(P, "D1")
    OD = ext.form_to_matrix(Multivector.basis(3, [1, 2]))
    assert np.max(np.abs(Q.matrices[0] - OD)) < 1e-12
    assert np.max(np.abs(Q.matrices[1] - P.matrices[0])) < 1e-12


def test_double_rotation_recovers_triple_up_to_sign():
    P = normal_form(1, 2)
    OD = ext.form_to_matrix(dualizing_form(P))
    originals = [P.matrices[0], P.matrices[1], OD]
    Q = rotate_structure(rotate_structure(P, "D1"), "D1")
    QD = ext.form_to_matrix(dualizing_form(Q))
    for A in list(Q.matrices) + [QD]:
        hit = min(
            min(np.max(np.abs(A - B)), np.max(np.abs(A + B)))
            for B in originals)
        assert hit < 1e-10


def test_rotate_requires_compatible_metric():
    P = normal_form(1, 2).with_metric(np.diag([1.0, 1.0, 4.0]))
    with pytest.raises(NotCompatible):
        rotate_structure(P, "D1")


# ---------------------------------------------------------------------------
# interpolate_block_compatible


def block_test_oracle(g, P):
    # independent implementation, deliberately not sharing code paths
    Fj = P.kernel_blocks()
    for j in range(P.s):
        for k in range(P.s):
            if j != k and np.max(np.abs(Fj[j].T @ g @ Fj[k])) > 1e-8:
                return False
    F = np.hstack(Fj)
    q, _ = np.linalg.qr(np.linalg.solve(g, np.linalg.qr(F)[0]))
    # complement = g^-1 applied to an orthogonal complement basis of F
    full = np.linalg.svd(F.T)[2][P.n * P.s:].T
    W = np.linalg.solve(g, full)
    for A in P.matrices:
        if np.max(np.abs(W.T @ A @ W)) > 1e-8:
            return False
    return True


def test_interpolate_endpoints_and_midpoint():
    P = normal_form(2, 2, metric=False)
    g1 = np.diag([2.0, 3.0, 1.0, 1.5, 0.5, 1.0])
    g2 = np.diag([1.0, 1.0, 1.0, 1.5, 0.5, 1.0])
    assert is_block_compatible(g1, P) and block_test_oracle(g1, P)
    assert is_block_compatible(g2, P) and block_test_oracle(g2, P)
    np.testing.assert_allclose(interpolate_block_compatible(g1, g2, P, 1.0), g1)
    np.testing.assert_allclose(interpolate_block_compatible(g1, g2, P, 0.0), g2)
    mid = interpolate_block_compatible(g1, g2, P, 0.5)
    assert is_block_compatible(mid, P) and block_test_oracle(mid, P)


def test_interpolate_rejects_disagreement_on_kernel_sum():
    P = normal_form(1, 2, metric=False)
    g1 = np.diag([1.0, 2.0, 1.0])
    g2 = np.diag([1.0, 3.0, 1.0])
    with pytest.raises(GeometryError):
        interpolate_block_compatible(g1, g2, P, 0.5)


def test_interpolate_rejects_non_block_compatible():
    P = normal_form(1, 2, metric=False)
    g1 = np.eye(3)
    g1[1, 2] = g1[2, 1] = 0.5  # couples the two fibre blocks
    with pytest.raises(GeometryError):
        interpolate_block_compatible(g1, np.eye(3), P, 0.5)


def test_interpolate_parameter_range():
    P = normal_form(1, 2, metric=False)
    with pytest.raises(ValueError):
        interpolate_block_compatible(np.eye(3), np.eye(3), P, 1.5)


# ---------------------------------------------------------------------------
# metric_from_data


def test_metric_from_data_trivial():
    P = normal_form(1, 2, metric=False)
    W = np.array([[1.0], [0.0], [0.0]])
    g = metric_from_data(np.eye(3), W, P)
    np.testing.assert_allclose(g, np.eye(3), atol=1e-12)


def test_metric_from_data_round_trip():
    rng = np.random.default_rng(20)
    for n in (1, 2, 3):
        P = pulled_back(normal_form(n, 2), well_conditioned(rng, 3 * n))
        g1, W = metric_data(P)
        rebuilt = metric_from_data(g1, W, P)
        assert np.max(np.abs(rebuilt - P.metric)) < 1e-10 * max(
            1.0, np.max(np.abs(P.metric)))


def test_metric_from_data_rejects_degenerate_datum():
    P = normal_form(1, 2, metric=False)
    W = np.array([[1.0], [0.0], [0.0]])
    with pytest.raises(NotPositiveDefinite):
        metric_from_data(np.zeros((3, 3)), W, P)


def test_metric_from_data_rejects_non_complementary_subspace():
    P = normal_form(1, 2, metric=False)
    W = np.array([[0.0], [1.0], [0.0]])  # lies inside the kernel sum
    with pytest.raises(GeometryError):
        metric_from_data(np.eye(3), W, P)
