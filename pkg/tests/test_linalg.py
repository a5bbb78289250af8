import numpy as np
import pytest

from chomp.exceptions import DimensionMismatch, NotPositiveDefinite, RankDeficient
from chomp.linalg import cholesky, projection, solve_lower, solve_upper, top_eigenpairs


def random_spd(rng, p, ridge=1.0):
    G = rng.standard_normal((p, p))
    return G @ G.T + ridge * np.eye(p)


class TestCholesky:
    def test_identity(self):
        L = cholesky(np.eye(3))
        assert np.array_equal(L, np.eye(3))

    def test_hand_checked_2x2(self):
        L = cholesky(np.array([[4.0, 2.0], [2.0, 5.0]]))
        assert np.allclose(L, [[2.0, 0.0], [1.0, 2.0]])

    def test_reconstruction_random_spd(self):
        rng = np.random.default_rng(7)
        A = random_spd(rng, 6)
        L = cholesky(A)
        assert np.linalg.norm(L @ L.T - A) <= 1e-10 * np.linalg.norm(A)
        assert np.all(np.triu(L, 1) == 0.0)
        assert np.all(np.diag(L) > 0.0)

    def test_reconstruction_property(self):
        rng = np.random.default_rng(2024)
        for p in (1, 2, 3, 5, 10, 40):
            A = random_spd(rng, p, ridge=0.5)
            L = cholesky(A)
            assert np.linalg.norm(L @ L.T - A) <= 1e-10 * np.linalg.norm(A)

    def test_rank_deficient_raises(self):
        # sample covariance with n < p has rank < p
        rng = np.random.default_rng(3)
        X = rng.standard_normal((4, 8))
        S = X.T @ X / 4
        with pytest.raises(NotPositiveDefinite):
            cholesky(S)

    def test_tiny_pivot_reports_location(self):
        S = np.diag([1.0, 1e-30, 2.0])
        with pytest.raises(NotPositiveDefinite) as info:
            cholesky(S)
        assert info.value.index == 1

    def test_asymmetric_rejected(self):
        with pytest.raises(ValueError):
            cholesky(np.array([[1.0, 0.5], [0.0, 1.0]]))

    def test_non_square_rejected(self):
        with pytest.raises(DimensionMismatch):
            cholesky(np.ones((2, 3)))


class TestTriangularSolves:
    def test_lower_identity(self):
        b = np.array([1.0, -2.0, 3.0])
        assert np.array_equal(solve_lower(np.eye(3), b), b)

    def test_lower_hand_checked(self):
        L = np.array([[2.0, 0.0], [1.0, 2.0]])
        assert np.allclose(solve_lower(L, np.array([2.0, 3.0])), [1.0, 1.0])

    def test_lower_residual_random(self):
        rng = np.random.default_rng(11)
        L = np.tril(rng.standard_normal((8, 8)))
        np.fill_diagonal(L, np.abs(np.diag(L)) + 0.5)
        b = rng.standard_normal(8)
        x = solve_lower(L, b)
        assert np.max(np.abs(L @ x - b)) < 1e-10 * np.max(np.abs(b))

    def test_upper_identity(self):
        b = np.array([4.0, 5.0])
        assert np.array_equal(solve_upper(np.eye(2), b), b)

    def test_compose_solves_matches_direct_inverse(self):
        rng = np.random.default_rng(13)
        S = random_spd(rng, 7)
        eta = rng.standard_normal(7)
        L = cholesky(S)
        beta = solve_upper(L.T, solve_lower(L, eta))
        assert np.allclose(beta, np.linalg.solve(S, eta), atol=1e-10)

    def test_residual_property_both_orientations(self):
        rng = np.random.default_rng(5)
        for p in (1, 3, 6, 12):
            L = np.tril(rng.standard_normal((p, p)))
            np.fill_diagonal(L, np.abs(np.diag(L)) + 1.0)
            b = rng.standard_normal(p)
            assert np.max(np.abs(L @ solve_lower(L, b) - b)) < 1e-10 * (np.max(np.abs(b)) + 1)
            U = L.T
            assert np.max(np.abs(U @ solve_upper(U, b) - b)) < 1e-10 * (np.max(np.abs(b)) + 1)

    def test_singular_pivot_rejected(self):
        L = np.array([[1.0, 0.0], [1.0, 0.0]])
        with pytest.raises(ValueError):
            solve_lower(L, np.ones(2))

    def test_length_mismatch(self):
        with pytest.raises(DimensionMismatch):
            solve_lower(np.eye(3), np.ones(2))

    def test_not_triangular_rejected(self):
        with pytest.raises(ValueError):
            solve_lower(np.full((2, 2), 1.0), np.ones(2))


class TestTopEigenpairs:
    def test_diagonal_descending_value(self):
        eig = top_eigenpairs(np.diag([3.0, 2.0, 1.0]), d=2)
        assert np.allclose(eig.values, [3.0, 2.0])
        assert np.allclose(np.abs(eig.vectors), np.eye(3)[:, :2])

    def test_abs_ordering_picks_negative(self):
        eig = top_eigenpairs(np.diag([-5.0, 1.0]), d=1, ordering="abs")
        assert np.allclose(eig.values, [-5.0])
        assert np.allclose(np.abs(eig.vectors[:, 0]), [1.0, 0.0])

    def test_eigen_residual_random(self):
        rng = np.random.default_rng(17)
        A = rng.standard_normal((10, 10))
        S = (A + A.T) / 2
        eig = top_eigenpairs(S, d=4)
        for j in range(4):
            v = eig.vectors[:, j]
            assert np.linalg.norm(S @ v - eig.values[j] * v) < 1e-8

    def test_orthonormal_columns(self):
        rng = np.random.default_rng(19)
        A = rng.standard_normal((9, 9))
        S = (A + A.T) / 2
        V = top_eigenpairs(S, d=5).vectors
        assert np.allclose(V.T @ V, np.eye(5), atol=1e-8)

    def test_sign_convention(self):
        rng = np.random.default_rng(23)
        A = rng.standard_normal((6, 6))
        S = (A + A.T) / 2
        V = top_eigenpairs(S, d=6).vectors
        for j in range(6):
            k = np.argmax(np.abs(V[:, j]))
            assert V[k, j] > 0

    def test_d_out_of_range(self):
        with pytest.raises(DimensionMismatch):
            top_eigenpairs(np.eye(3), d=4)
        with pytest.raises(DimensionMismatch):
            top_eigenpairs(np.eye(3), d=0)


class TestProjection:
    def test_unit_vector(self):
        P = projection(np.array([1.0, 0.0, 0.0]))
        assert np.allclose(P, np.diag([1.0, 0.0, 0.0]))

    def test_scale_invariance(self):
        v = np.array([1.0, -2.0, 0.5])
        assert np.allclose(projection(v), projection(2.0 * v), atol=1e-12)

    def test_idempotent_symmetric_trace(self):
        rng = np.random.default_rng(29)
        B = rng.standard_normal((6, 2))
        P = projection(B)
        assert np.allclose(P, P.T, atol=1e-10)
        assert np.allclose(P @ P, P, atol=1e-10)
        assert abs(np.trace(P) - 2.0) < 1e-8

    def test_invariant_under_right_multiplication(self):
        rng = np.random.default_rng(31)
        for _ in range(20):
            B = rng.standard_normal((7, 3))
            R = rng.standard_normal((3, 3)) + 3.0 * np.eye(3)
            assert np.allclose(projection(B), projection(B @ R), atol=1e-8)

    def test_zero_column_raises(self):
        B = np.zeros((4, 2))
        B[0, 0] = 1.0
        with pytest.raises(RankDeficient):
            projection(B)

    def test_collinear_columns_raise(self):
        v = np.array([1.0, 2.0, 3.0])
        with pytest.raises(RankDeficient):
            projection(np.column_stack([v, 2 * v]))
