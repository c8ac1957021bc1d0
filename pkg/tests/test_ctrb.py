import numpy as np
import pytest

from hetnet import (ToleranceConfig, is_xi_uncontrollable, kalman_decomposition, kalman_test,
                    left_eigenpairs, numerical_rank, pbh_test, to_controllable_canonical,
                    uncontrollable_basis)
from hetnet.ctrb import companion, span_residual
from hetnet.errors import DimensionMismatch, NotControllable

from _gen import random_pair

A1 = np.array([[1.0, 2, 0], [1, 1, 1], [2, 1, 0]])
B1 = np.array([[0.0], [-1], [3]])
XI1 = np.array([5.0, 6, 2])
STAR_L = np.array([[2.0, -1, -1], [-1, 1, 0], [-1, 0, 1]])
E1 = np.eye(3)[:, [0]]


def parallel(u, v, tol=1e-8):
    u = np.asarray(u).reshape(-1)
    v = np.asarray(v).reshape(-1)
    return abs(abs(np.vdot(u, v)) - np.linalg.norm(u) * np.linalg.norm(v)) <= tol * np.linalg.norm(
        u) * np.linalg.norm(v)


def test_tolerance_config_positive():
    with pytest.raises(ValueError):
        ToleranceConfig(rank_tol_factor=0)
    with pytest.raises(ValueError):
        ToleranceConfig(residual_tol=-1)


def test_numerical_rank():
    assert numerical_rank(np.eye(3)) == 3
    assert numerical_rank(np.zeros((2, 4))) == 0
    assert numerical_rank(np.array([[1.0, 2], [2, 4]])) == 1


def test_kalman_examples():
    assert kalman_test(A1, B1) == (2, False)
    assert kalman_test(np.zeros((1, 1)), np.ones((1, 1))) == (1, True)
    assert kalman_test(STAR_L, E1) == (2, False)


def test_left_eigenpairs_diag():
    pairs = left_eigenpairs(np.diag([1.0, 2.0]))
    assert [round(float(np.real(lam)), 12) for lam, _ in pairs] == [1.0, 2.0]
    assert parallel(pairs[0][1][:, 0], [1, 0]) and parallel(pairs[1][1][:, 0], [0, 1])


def test_left_eigenpairs_uncontrollable_triple():
    pairs = left_eigenpairs(A1)
    lam, V = min(pairs, key=lambda p: abs(p[0] - 3))
    assert abs(lam - 3) < 1e-8
    assert V.shape[1] == 1 and parallel(V[:, 0], XI1)


def test_left_eigenpairs_jordan_block():
    pairs = left_eigenpairs(np.array([[0.0, 1], [0, 0]]))
    assert len(pairs) == 1
    lam, V = pairs[0]
    assert abs(lam) < 1e-8 and V.shape[1] == 1 and parallel(V[:, 0], [0, 1])


def test_left_eigenpairs_complex():
    rot = np.array([[0.0, -1], [1, 0]])
    pairs = left_eigenpairs(rot)
    lams = sorted((complex(lam) for lam, _ in pairs), key=lambda z: z.imag)
    assert np.allclose(lams, [-1j, 1j])
    for lam, V in pairs:
        assert np.linalg.norm(V.T @ rot - lam * V.T) < 1e-10


def test_pbh_examples():
    ok, (lam, xi) = pbh_test(A1, B1)
    assert not ok and abs(lam - 3) < 1e-8 and parallel(xi, XI1)
    assert pbh_test(np.diag([1.0, 2.0]), np.ones((2, 1))) == (True, None)
    ok, (lam, xi) = pbh_test(STAR_L, E1)
    assert not ok and abs(lam - 1) < 1e-8 and parallel(xi, [0, 1, -1])


def test_uncontrollable_basis_examples():
    basis = uncontrollable_basis(A1, B1)
    assert len(basis.groups) == 1
    lam, V = basis.groups[0]
    assert abs(lam - 3) < 1e-8
    assert span_residual(V, XI1.reshape(-1, 1) / np.linalg.norm(XI1)) < 1e-8
    assert not uncontrollable_basis(np.diag([1.0, 2.0]), np.ones((2, 1)))
    lam, V = uncontrollable_basis(np.eye(2), np.ones((2, 1))).groups[0]
    assert abs(lam - 1) < 1e-12 and V.shape[1] == 1 and parallel(V[:, 0], [1, -1])


def test_is_xi_uncontrollable_examples():
    assert is_xi_uncontrollable(A1, B1, [XI1])
    assert is_xi_uncontrollable(A1, B1, [2 * XI1])
    assert not is_xi_uncontrollable(A1, B1, [])
    assert not is_xi_uncontrollable(A1, B1, [[1.0, 0, 0]])
    assert is_xi_uncontrollable(np.diag([1.0, 2.0]), np.ones((2, 1)), [])
    with pytest.raises(DimensionMismatch):
        is_xi_uncontrollable(A1, B1, [[1.0, 2.0]])


def test_basis_json_has_complex_parts():
    # a rotation block that the input cannot reach
    A = np.zeros((3, 3))
    A[1:, 1:] = [[0, -1], [1, 0]]
    data = uncontrollable_basis(A, np.eye(3)[:, [0]]).to_json()
    assert {"re", "im"} <= set(data[0]["eigenvalue"])


def test_kalman_decomposition_examples():
    kd = kalman_decomposition(A1, B1)
    assert kd.dim_c == 2
    assert np.allclose(kd.Au, [[3.0]])
    kd = kalman_decomposition(np.diag([1.0, 2.0]), np.array([1.0, 0]))
    assert kd.dim_c == 1 and np.allclose(kd.Au, [[2.0]])
    kd = kalman_decomposition(np.array([[0.0, 1], [0, 0]]), np.array([0.0, 1]))
    assert kd.dim_c == 2 and kd.Au.shape == (0, 0)


def check_canonical(A, b, T, alpha):
    n = A.shape[0]
    assert np.linalg.norm(T @ A @ np.linalg.inv(T) - companion(alpha)) <= 1e-9 * max(
        1.0, np.linalg.norm(A))
    assert np.allclose(T @ b, np.eye(n)[-1])


def test_canonical_examples():
    T, alpha = to_controllable_canonical(np.array([[0.0, 1], [0, 0]]), np.array([0.0, 1]))
    assert np.allclose(T, np.eye(2)) and np.allclose(alpha, [0, 0])
    A2, b2 = np.array([[1.0, 1], [1, 0]]), np.array([1.0, 1])
    check_canonical(A2, b2, *to_controllable_canonical(A2, b2))
    T, alpha = to_controllable_canonical(np.array([[0.7]]), np.array([4.0]))
    assert np.allclose(T, [[0.25]]) and np.allclose(alpha, [0.7])
    with pytest.raises(NotControllable):
        to_controllable_canonical(A1, B1)


def test_companion_shape():
    C = companion([1.0, 2.0, 3.0])
    assert np.array_equal(C, [[0, 1, 0], [0, 0, 1], [1, 2, 3]])


# properties over the seeded random pairs

PAIRS = [random_pair(np.random.default_rng([101, k])) for k in range(200)]


def test_kalman_and_pbh_agree():
    for A, B in PAIRS:
        rank, ok = kalman_test(A, B)
        assert ok == pbh_test(A, B)[0]
        # simple random spectra: one eigenvector per missing dimension
        assert rank == A.shape[0] - len(uncontrollable_basis(A, B))


def test_kalman_rank_near_eigenvector_input():
    # b is an eigenvector for a small eigenvalue; powers of A amplify roundoff
    rng = np.random.default_rng(3)
    n = 8
    A = rng.standard_normal((n, n))
    A[1:, 0] = 0
    A[0, 0] = 0.05
    Q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    A, b = Q @ A @ Q.T, Q[:, [0]]
    assert kalman_test(A, b) == (1, False)
    assert kalman_decomposition(A, b).dim_c == 1
    assert len(uncontrollable_basis(A, b)) == n - 1


def test_staircase_matches_power_rank_on_examples():
    from hetnet.ctrb import controllable_subspace
    U, r = controllable_subspace(A1, B1)
    assert r == 2 and np.allclose(U.T @ U, np.eye(3))
    # the controllable subspace is orthogonal to the uncontrollable left eigenvector
    assert np.allclose(XI1 @ U[:, :2], 0, atol=1e-12)


def test_basis_empty_iff_pbh_passes():
    unc = 0
    for A, B in PAIRS:
        basis = uncontrollable_basis(A, B)
        assert (not basis) == pbh_test(A, B)[0]
        unc += bool(basis)
    assert 20 < unc < 180


def test_basis_invariants():
    cfg = ToleranceConfig()
    for A, B in PAIRS:
        basis = uncontrollable_basis(A, B, cfg)
        lams = basis.eigenvalues
        for i, (lam, V) in enumerate(basis.groups):
            assert np.linalg.norm(V.T @ A - lam * V.T) <= 1e-6 * np.linalg.norm(A)
            assert np.linalg.norm(V.T @ B) <= 1e-6 * np.linalg.norm(B)
            assert np.allclose(V.conj().T @ V, np.eye(V.shape[1]), atol=1e-10)
            assert all(abs(lam - mu) > 0 for mu in lams[:i])


def test_basis_change_within_groups():
    # any invertible recombination of a group's vectors spans the same space
    for k, (A, B) in enumerate(PAIRS):
        basis = uncontrollable_basis(A, B)
        if not basis:
            continue
        rng = np.random.default_rng([102, k])
        xi = []
        for _, V in basis.groups:
            r = V.shape[1]
            xi.extend((V @ (rng.standard_normal((r, r)) + 3 * np.eye(r))).T)
        assert is_xi_uncontrollable(A, B, xi)


SINGLE = [random_pair(np.random.default_rng([103, k]), max_m=1) for k in range(200)]


def test_kalman_decomposition_properties():
    for A, b in SINGLE:
        kd = kalman_decomposition(A, b)
        n = A.shape[0]
        nA = max(np.linalg.norm(A), 1.0)
        basis = uncontrollable_basis(A, b)
        # random draws have simple spectra, so eigenvector count = uncontrollable dimension
        assert kd.dim_c == n - len(basis)
        assert np.linalg.norm(kd.T_inv @ kd.block_matrix() @ kd.T - A) <= 1e-7 * nA
        assert np.linalg.norm(kd.lower_left) <= 1e-7 * nA
        assert np.allclose(kd.T @ b[:, 0], np.r_[kd.bc, np.zeros(n - kd.dim_c)], atol=1e-8)
        if kd.dim_c:
            assert np.allclose(kd.bc, np.eye(kd.dim_c)[-1], atol=1e-8)
            assert np.allclose(kd.Ac[:-1], np.eye(kd.dim_c, k=1)[:-1], atol=1e-8)
        unc_eigs = np.sort_complex(np.linalg.eigvals(kd.Au)) if kd.Au.size else np.zeros(0)
        carried = np.sort_complex(np.array(basis.eigenvalues, dtype=complex))
        assert np.allclose(unc_eigs, carried, atol=1e-6)


def test_decomposition_rank_matches_kalman_on_examples():
    for A, b in [(A1, B1), (STAR_L, E1), (np.diag([1.0, 2.0]), np.array([1.0, 0]))]:
        assert kalman_decomposition(A, b).dim_c == kalman_test(A, b)[0]


def test_canonical_basis_invariance():
    for A, b in SINGLE:
        b = b[:, 0]
        if not kalman_test(A, b)[1]:
            continue
        T, alpha = to_controllable_canonical(A, b)
        Ti = np.linalg.inv(T)
        assert kalman_test(T @ A @ Ti, T @ b)[1]
        assert np.allclose(T @ b, np.eye(A.shape[0])[-1], atol=1e-8)
        if A.shape[0] <= 6:
            check_canonical(A, b, T, alpha)
