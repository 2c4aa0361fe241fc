"""Boundary-pair validation, the unitary invariant and angle classification."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from halfline import (
    classify,
    compute_U,
    diagonal_pair,
    random_pair,
    validate_pair,
)
from halfline.errors import (
    AngleOutOfRange,
    Degenerate,
    DimensionMismatch,
    SelfAdjointnessViolated,
)

PI = np.pi


def test_validate_dirichlet_and_neumann():
    d = validate_pair(np.zeros((2, 2)), np.eye(2))
    n = validate_pair(np.eye(2), np.zeros((2, 2)))
    assert d.n == n.n == 2


def test_validate_rejects_non_selfadjoint():
    # A†B - B†A = [[0,1],[-1,0]] by direct evaluation
    A = np.array([[1.0, 0.0], [0.0, 0.0]])
    B = np.array([[0.0, 1.0], [0.0, 0.0]])
    with pytest.raises((SelfAdjointnessViolated, Degenerate)):
        validate_pair(A, B)


def test_validate_rejects_degenerate():
    with pytest.raises(Degenerate):
        validate_pair(np.zeros((2, 2)), np.zeros((2, 2)))


def test_validate_rejects_shape_mismatch():
    with pytest.raises(DimensionMismatch):
        validate_pair(np.zeros((2, 2)), np.eye(3))
    with pytest.raises(DimensionMismatch):
        validate_pair(np.zeros((2, 3)), np.zeros((2, 3)))


@pytest.mark.parametrize("A,B,expected", [
    ([[0.0]], [[1.0]], 1.0),
    ([[1.0]], [[0.0]], -1.0),
    ([[-np.sin(PI / 4)]], [[np.cos(PI / 4)]], 1j),
])
def test_compute_u_scalar_cases(A, B, expected):
    U = compute_U(validate_pair(A, B))
    assert abs(U[0, 0] - expected) < 1e-14


def test_random_pair_round_trips_to_u0():
    pair = random_pair(3, seed=7)
    # by construction B + iA = I and B - iA is the generating unitary
    U0 = pair.B - 1j * pair.A
    np.testing.assert_allclose(pair.B + 1j * pair.A, np.eye(3), atol=1e-14)
    np.testing.assert_allclose(compute_U(pair), U0, atol=1e-12)


@pytest.mark.parametrize("n", [1, 2, 5, 16])
def test_unitarity_residual(n):
    pair = random_pair(n, seed=100 + n)
    U = compute_U(pair)
    assert np.linalg.norm(U.conj().T @ U - np.eye(n)) <= 1e-12


def test_gauge_invariance_of_u():
    rng = np.random.default_rng(5)
    pair = random_pair(3, seed=9)
    U = compute_U(pair)
    for _ in range(10):
        while True:
            T = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
            if np.linalg.cond(T) <= 1e3:
                break
        gauged = validate_pair(pair.A @ T, pair.B @ T)
        np.testing.assert_allclose(compute_U(gauged), U, atol=1e-10)


def test_classify_dirichlet():
    cls = classify(validate_pair(np.zeros((2, 2)), np.eye(2)))
    np.testing.assert_allclose(cls.thetas, [PI, PI])
    assert (cls.n_D, cls.n_N, cls.n_M, cls.n_Mb) == (2, 0, 0, 0)
    np.testing.assert_allclose(cls.ThetaT, 0.0)
    np.testing.assert_allclose(cls.Theta, 0.0)


def test_classify_neumann():
    cls = classify(validate_pair(np.eye(2), np.zeros((2, 2))))
    np.testing.assert_allclose(cls.thetas, [PI / 2, PI / 2])
    assert (cls.n_N, cls.n_D) == (2, 0)
    np.testing.assert_allclose(cls.ThetaT, 0.0)
    np.testing.assert_allclose(cls.Theta, 0.0)


def test_classify_mixed_three_quarter():
    # hand evaluation: U = e^{2i·3π/4}, ThetaT entry tan(3π/4) = -1
    cls = classify(diagonal_pair([3 * PI / 4]))
    assert cls.n_M == 1 and cls.n_Mb == 0
    np.testing.assert_allclose(cls.thetas, [3 * PI / 4], atol=1e-12)
    np.testing.assert_allclose(cls.ThetaT, [-1.0], atol=1e-12)
    np.testing.assert_allclose(cls.Theta, [1 / np.tan(3 * PI / 4)], atol=1e-12)


def test_classify_binding_channel_counted():
    cls = classify(diagonal_pair([PI / 4]))
    assert cls.n_Mb == 1 and cls.n_M == 1
    np.testing.assert_allclose(cls.ThetaT, [0.0])
    np.testing.assert_allclose(cls.binding_free_eigenvalues, [-1.0], atol=1e-12)


def test_diagonal_pair_entries():
    pair = diagonal_pair([PI / 4, PI])
    np.testing.assert_allclose(np.diag(pair.A), [-np.sqrt(2) / 2, 0.0], atol=1e-15)
    np.testing.assert_allclose(np.diag(pair.B), [np.sqrt(2) / 2, -1.0], atol=1e-15)


def test_diagonal_pair_rejects_bad_angle():
    with pytest.raises(AngleOutOfRange):
        diagonal_pair([0.0])
    with pytest.raises(AngleOutOfRange):
        diagonal_pair([PI + 0.1])


angle = st.one_of(
    st.floats(min_value=0.05, max_value=PI - 0.01),
    st.just(PI / 2),
    st.just(PI),
)


@settings(max_examples=40, deadline=None)
@given(st.lists(angle, min_size=1, max_size=5))
def test_classify_round_trips_diagonal_angles(thetas):
    cls = classify(diagonal_pair(thetas))
    np.testing.assert_allclose(cls.thetas, np.sort(thetas), atol=1e-10)
    assert cls.n_N + cls.n_D + cls.n_M == len(thetas)
    assert cls.n_Mb <= cls.n_M
    # hatted tangent is never positive
    assert np.all(cls.ThetaT <= 1e-15)


@pytest.mark.parametrize("seed", range(6))
def test_counts_partition_dimension(seed):
    cls = classify(random_pair(4, seed=seed))
    assert cls.n_N + cls.n_D + cls.n_M == 4
    assert 0 <= cls.n_Mb <= cls.n_M


def test_theta_matrices_ignore_diagonalizer_choice():
    # degenerate angle pair: any orthonormal mix within the θ=π/4 eigenspace
    # must leave M Θ_T M† and M Θ M† unchanged
    cls = classify(diagonal_pair([PI / 4, PI / 4, 3 * PI / 4]))
    W_tan = cls.theta_t_matrix()
    W_cot = cls.theta_matrix()
    rng = np.random.default_rng(3)
    Z = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    Q, _ = np.linalg.qr(Z)
    mix = np.eye(3, dtype=complex)
    block = np.nonzero(np.abs(cls.thetas - PI / 4) < 1e-12)[0]
    mix[np.ix_(block, block)] = Q
    M2 = cls.M @ mix
    np.testing.assert_allclose(M2 @ np.diag(cls.ThetaT) @ M2.conj().T, W_tan,
                               atol=1e-12)
    np.testing.assert_allclose(M2 @ np.diag(cls.Theta) @ M2.conj().T, W_cot,
                               atol=1e-12)
    for W in (W_tan, W_cot):
        np.testing.assert_allclose(W, W.conj().T, atol=1e-13)


def test_classification_diagonalizes_u():
    for seed in range(4):
        pair = random_pair(3, seed=40 + seed)
        cls = classify(pair)
        D = cls.M.conj().T @ cls.U @ cls.M
        off = D - np.diag(np.diag(D))
        assert np.linalg.norm(off) < 1e-12
        np.testing.assert_allclose(np.abs(np.diag(D)), 1.0, atol=1e-12)
        np.testing.assert_allclose(np.angle(np.diag(D)),
                                   np.angle(np.exp(2j * cls.thetas)), atol=1e-10)


def test_snapping_near_dirichlet_eigenvalue():
    # a pair a hair away from Dirichlet must classify as Dirichlet, not as
    # an absurdly deep binding channel
    eps = 1e-12
    pair = diagonal_pair([eps])
    cls = classify(pair)
    assert cls.n_D == 1 and cls.n_Mb == 0
