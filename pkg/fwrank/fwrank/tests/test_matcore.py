import numpy as np
import pytest

from fwrank.exceptions import (
    BadArgs,
    DimensionMismatch,
    NegativeEntryNonIntegerPower,
    NotPSD,
    NotSymmetric,
    ZeroDiagonalNonzeroRow,
)
from fwrank.matcore import (
    SymMatrix,
    ToleranceConfig,
    bandwidth,
    comparison_matrix,
    diagonal_normalize,
    hadamard_power,
    hadamard_product,
    is_diagonally_dominant,
    is_psd,
    is_scaled_diagonally_dominant,
    nnz_stats,
    psd_rank,
    require_psd,
)

RNG = np.random.default_rng(0)


def random_psd(n, rank, rng=RNG):
    G = rng.standard_normal((n, rank))
    return SymMatrix(G @ G.T)


class TestToleranceConfig:
    def test_defaults(self):
        cfg = ToleranceConfig()
        assert cfg.tol_psd == 1e-9
        assert cfg.tol_recon == 1e-8
        assert cfg.tol_zero == 1e-12
        assert cfg.max_iter == 50000

    @pytest.mark.parametrize("field", ["tol_psd", "tol_recon", "tol_zero"])
    def test_rejects_non_positive(self, field):
        with pytest.raises(BadArgs):
            ToleranceConfig(**{field: 0.0})

    def test_from_settings_with_overrides(self):
        cfg = ToleranceConfig.from_settings({'TOL_PSD': 1e-7, 'MAX_ITER': 10}, tol_recon=1e-6, tol_zero=None)
        assert cfg.tol_psd == 1e-7
        assert cfg.tol_recon == 1e-6
        assert cfg.tol_zero == 1e-12
        assert cfg.max_iter == 10


class TestSymMatrix:
    def test_mirrors_upper_triangle(self):
        A = SymMatrix([[1.0, 2.0], [2.0 + 1e-13, 5.0]])
        assert A[1, 0] == A[0, 1] == 2.0

    def test_read_only(self):
        A = SymMatrix(np.eye(2))
        with pytest.raises(ValueError):
            A.array[0, 0] = 3.0

    def test_rejects_non_square(self):
        with pytest.raises(DimensionMismatch):
            SymMatrix([[1.0, 2.0, 3.0]])

    def test_rejects_asymmetric(self):
        with pytest.raises(NotSymmetric):
            SymMatrix([[1.0, 0.5], [0.4, 1.0]])

    def test_symmetry_tolerance_scales_with_entries(self):
        with pytest.raises(NotSymmetric):
            SymMatrix([[1e-12, 1e-13], [2e-13, 1e-12]])
        A = SymMatrix(np.array([[1.0, 2.0], [2.0 + 1e-13, 5.0]]) * 1e-12)
        assert A[1, 0] == A[0, 1]
        assert SymMatrix(np.zeros((2, 2))).n == 2

    def test_from_upper(self):
        A = SymMatrix.from_upper(3, [(0, 0, 2.0), (0, 2, -1.0), (2, 2, 2.0)])
        np.testing.assert_array_equal(A.array, [[2, 0, -1], [0, 0, 0], [-1, 0, 2]])

    def test_permuted_and_principal(self):
        A = SymMatrix([[1, 2, 0], [2, 5, 3], [0, 3, 9]])
        P = A.permuted([2, 0, 1])
        assert P[0, 0] == 9 and P[0, 2] == 3 and P[1, 2] == 2
        np.testing.assert_array_equal(A.principal([0, 2]).array, [[1, 0], [0, 9]])

    def test_packed(self):
        A = SymMatrix([[1, 2], [2, 3]])
        np.testing.assert_array_equal(A.packed(), [1, 2, 3])


class TestIsPSD:
    def test_positive_definite(self):
        result = is_psd(SymMatrix([[2, -1], [-1, 2]]))
        assert result.success and result.rank == 2
        np.testing.assert_allclose(result.reconstruct(), [[2, -1], [-1, 2]], atol=1e-12)

    def test_indefinite(self):
        assert not is_psd(SymMatrix([[1, 2], [2, 1]])).success

    def test_negative_diagonal(self):
        assert not is_psd(SymMatrix([[-1, 0], [0, 1]])).success

    def test_zero_matrix_has_rank_zero(self):
        result = is_psd(SymMatrix(np.zeros((3, 3))))
        assert result.success and result.rank == 0

    @pytest.mark.parametrize("n,rank", [(4, 1), (5, 3), (6, 6)])
    def test_rank_of_gram_matrices(self, n, rank):
        A = random_psd(n, rank)
        assert psd_rank(A) == rank
        np.testing.assert_allclose(is_psd(A).reconstruct(), A.array, atol=1e-9)

    def test_require_psd_raises(self):
        with pytest.raises(NotPSD):
            require_psd(SymMatrix([[1, 2], [2, 1]]))

    @pytest.mark.parametrize("n,rank", [(5, 2), (5, 5)])
    def test_permutation_invariance(self, n, rank):
        rng = np.random.default_rng(7)
        A = random_psd(n, rank, rng)
        for _ in range(5):
            result = is_psd(A.permuted(rng.permutation(n)))
            assert result.success and result.rank == rank
        indefinite = SymMatrix([[1, 2, 0], [2, 1, 0], [0, 0, 3]])
        assert not any(is_psd(indefinite.permuted(p)).success for p in ([0, 1, 2], [2, 0, 1], [1, 2, 0]))


class TestDiagonalNormalize:
    def test_unit_diagonal_and_restore(self):
        A = SymMatrix([[4, 2, 0], [2, 9, 3], [0, 3, 1]])
        norm = diagonal_normalize(A)
        np.testing.assert_array_equal(norm.B.diag(), np.ones(3))
        np.testing.assert_allclose(norm.restore(3).array, A.array, rtol=1e-14)

    def test_drops_zero_rows(self):
        A = SymMatrix([[1, 0, 0.5], [0, 0, 0], [0.5, 0, 1]])
        norm = diagonal_normalize(A)
        assert norm.kept == (0, 2)
        np.testing.assert_allclose(norm.restore(3).array, A.array)

    def test_zero_diagonal_with_nonzero_row(self):
        with pytest.raises(ZeroDiagonalNonzeroRow):
            diagonal_normalize(SymMatrix([[1, 1], [1, 0]]))

    def test_negative_diagonal(self):
        with pytest.raises(NotPSD):
            diagonal_normalize(SymMatrix([[1, 0], [0, -1]]))

    def test_all_zero(self):
        norm = diagonal_normalize(SymMatrix(np.zeros((2, 2))))
        assert norm.kept == ()


class TestStructure:
    def test_bandwidth(self):
        assert bandwidth(SymMatrix(np.eye(4))) == 1
        T = SymMatrix([[2, -1, 0], [-1, 2, -1], [0, -1, 2]])
        assert bandwidth(T) == 2
        assert bandwidth(SymMatrix([[1, 0, 1], [0, 1, 0], [1, 0, 1]])) == 3

    def test_nnz_stats(self):
        A = SymMatrix([[1, 1e-13, 2], [1e-13, 1, 0], [2, 0, 5]])
        assert nnz_stats(A) == (1, 2)

    def test_comparison_matrix(self):
        M = comparison_matrix(SymMatrix([[2, -1], [-1, 3]]))
        np.testing.assert_array_equal(M.array, [[2, -1], [-1, 3]])
        M = comparison_matrix(SymMatrix([[2, 1], [1, 3]]))
        np.testing.assert_array_equal(M.array, [[2, -1], [-1, 3]])

    def test_diagonal_dominance(self):
        assert is_diagonally_dominant(SymMatrix([[2, 1, -1], [1, 2, 1], [-1, 1, 2]]))
        assert not is_diagonally_dominant(SymMatrix([[1, 0.9, 0], [0.9, 1, 0.4], [0, 0.4, 1]]))

    def test_scaled_diagonal_dominance(self):
        # not diagonally dominant, but its comparison matrix is positive definite
        A = SymMatrix([[1, 0.9, 0], [0.9, 1, 0.4], [0, 0.4, 1]])
        assert is_scaled_diagonally_dominant(A)
        assert not is_scaled_diagonally_dominant(SymMatrix(np.ones((3, 3))))


class TestHadamard:
    def test_product_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            hadamard_product(SymMatrix(np.eye(2)), SymMatrix(np.eye(3)))

    def test_schur_product_is_psd(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            n = int(rng.integers(2, 7))
            A = random_psd(n, int(rng.integers(1, n + 1)), rng)
            B = random_psd(n, int(rng.integers(1, n + 1)), rng)
            assert is_psd(hadamard_product(A, B)).success

    def test_integer_power_of_negative_entries(self):
        A = SymMatrix([[1, -0.5], [-0.5, 1]])
        np.testing.assert_allclose(hadamard_power(A, 3).array, [[1, -0.125], [-0.125, 1]])

    def test_real_power_of_negative_entries(self):
        with pytest.raises(NegativeEntryNonIntegerPower):
            hadamard_power(SymMatrix([[1, -0.5], [-0.5, 1]]), 1.5)

    def test_power_must_be_positive(self):
        with pytest.raises(BadArgs):
            hadamard_power(SymMatrix(np.eye(2)), 0)

    @pytest.mark.parametrize("s", [0.5, 1.5, 2, 3.7])
    def test_diagonal_scaling_identity(self, s):
        rng = np.random.default_rng(11)
        G = rng.uniform(0, 1, (4, 4))
        A = SymMatrix(G @ G.T)
        d = rng.uniform(0.5, 2.0, 4)
        DAD = SymMatrix(A.array * np.outer(d, d))
        expected = hadamard_power(A, s).array * np.outer(d ** s, d ** s)
        np.testing.assert_allclose(hadamard_power(DAD, s).array, expected, rtol=1e-12)
