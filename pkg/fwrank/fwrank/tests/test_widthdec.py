import numpy as np
import pytest

from fwrank.exceptions import BadK, NotPSD
from fwrank.matcore import SymMatrix, comparison_matrix
from fwrank import widthdec
from fwrank.widthdec import (
    MEMBER,
    NOT_MEMBER,
    DualWitness,
    exact_membership,
    factor_width,
    factor_width_1,
    factor_width_le_2,
    membership,
    structural_width_upper_bound,
    verify_dual_witness,
)

T3 = SymMatrix([[2, 1, 0], [1, 2, 1], [0, 1, 2]])
J3 = SymMatrix(np.ones((3, 3)))
TOL = 1e-8


def tridiagonal(n, diag=2.0, off=-1.0):
    return SymMatrix(np.diag([diag] * n) + np.diag([off] * (n - 1), 1) + np.diag([off] * (n - 1), -1))


def arrowhead(n):
    a = np.eye(n) * 2.0
    a[0, 0] = float(n)
    a[0, 1:] = a[1:, 0] = 1.0
    return SymMatrix(a)


def strictly_dd(rng, n):
    off = np.triu(rng.uniform(-1.0, 1.0, (n, n)), 1)
    off = off + off.T
    return SymMatrix(off + np.diag(np.abs(off).sum(axis=1) + rng.uniform(0.5, 1.5, n)))


def rank_one(rng, n):
    x = rng.uniform(0.5, 1.5, n) * rng.choice([-1.0, 1.0], n)
    return SymMatrix(np.outer(x, x))


def wishart(rng, n):
    G = rng.standard_normal((n, n))
    return SymMatrix(G @ G.T + rng.uniform(0.0, 3.0) * np.eye(n))


def check_sound(A, k, verdict):
    if verdict.status == MEMBER:
        d = verdict.certificate
        assert d.residual <= TOL
        assert d.max_support() <= k
    elif verdict.status == NOT_MEMBER:
        assert verify_dual_witness(A, verdict.certificate, k)


class TestFastPaths:
    def test_width_one(self):
        assert factor_width_1(SymMatrix(np.diag([1.0, 0.0, 3.0])))
        assert not factor_width_1(T3)

    def test_width_two(self):
        assert factor_width_le_2(T3)
        assert not factor_width_le_2(J3)

    def test_not_psd(self):
        with pytest.raises(NotPSD):
            factor_width_le_2(SymMatrix([[1, 2], [2, 1]]))


class TestStructuralBound:
    def test_tridiagonal(self):
        assert structural_width_upper_bound(tridiagonal(5)) == (2, 'bandwidth')

    def test_star_is_chordal(self):
        assert structural_width_upper_bound(arrowhead(5)) == (2, 'chordal')

    def test_all_nonzero(self):
        A = SymMatrix(np.eye(4) * 4 + np.ones((4, 4)))
        assert structural_width_upper_bound(A) == (4, 'trivial')


class TestDualWitness:
    def test_comparison_matrix_separates_ones(self):
        W = comparison_matrix(J3)
        witness = DualWitness(W=W, inner_product=float(np.sum(W.array * J3.array)))
        assert witness.inner_product == -3.0
        assert verify_dual_witness(J3, witness, 2)

    def test_identity_never_separates(self):
        assert not verify_dual_witness(T3, DualWitness(W=SymMatrix(np.eye(3)), inner_product=6.0), 2)

    def test_negative_diagonal_fails_local_check(self):
        W = SymMatrix(np.diag([-1.0, 1.0, 1.0]))
        assert not verify_dual_witness(SymMatrix(np.eye(3)), DualWitness(W=W, inner_product=1.0), 1)

    def test_dimension_mismatch(self):
        assert not verify_dual_witness(T3, DualWitness(W=SymMatrix(np.eye(2)), inner_product=0.0), 2)


class TestMembership:
    def test_full_block(self):
        verdict = membership(J3, 3)
        assert verdict.status == MEMBER
        assert verdict.certificate.term_count() == 1
        check_sound(J3, 3, verdict)

    def test_tridiagonal_is_width_two(self):
        verdict = membership(T3, 2)
        assert verdict.status == MEMBER
        check_sound(T3, 2, verdict)

    def test_ones_is_not_width_two(self):
        verdict = membership(J3, 2)
        assert verdict.status == NOT_MEMBER
        check_sound(J3, 2, verdict)

    def test_zero_matrix(self):
        verdict = membership(SymMatrix(np.zeros((3, 3))), 2)
        assert verdict.status == MEMBER
        assert verdict.certificate.term_count() == 0

    @pytest.mark.parametrize("k", [0, 4])
    def test_bad_k(self, k):
        with pytest.raises(BadK):
            membership(T3, k)

    def test_nesting(self):
        verdict = membership(T3, 2)
        assert verdict.status == MEMBER
        assert membership(T3, 3, warm_start=verdict.certificate).status == MEMBER

    def test_exact_membership_witnesses(self):
        one = exact_membership(T3, 1)
        assert one.status == NOT_MEMBER
        assert verify_dual_witness(T3, one.certificate, 1)
        two = exact_membership(J3, 2)
        assert two.status == NOT_MEMBER
        assert verify_dual_witness(J3, two.certificate, 2)

    def test_exact_membership_certificates(self):
        for A, k in ((SymMatrix(np.diag([1.0, 2.0])), 1), (T3, 2)):
            verdict = exact_membership(A, k)
            assert verdict.status == MEMBER
            check_sound(A, k, verdict)

    @pytest.mark.slow
    def test_agrees_with_width_two_test(self):
        rng = np.random.default_rng(5)
        for t in range(200):
            A = (strictly_dd, rank_one, wishart)[t % 3](rng, 5)
            verdict = membership(A, 2)
            assert verdict.status == (MEMBER if factor_width_le_2(A) else NOT_MEMBER)
            check_sound(A, 2, verdict)


class TestFactorWidth:
    def test_diagonal(self):
        result = factor_width(SymMatrix(np.diag([1.0, 2.0, 0.0])))
        assert tuple(result) == (1, 'exact')

    def test_band_matrix(self):
        assert tuple(factor_width(tridiagonal(6, diag=2.0, off=1.0))) == (2, 'exact')

    @pytest.mark.parametrize("n", [3, 4])
    def test_ones_has_full_width(self, n):
        result = factor_width(SymMatrix(np.ones((n, n))))
        assert tuple(result) == (n, 'exact')
        assert result.bracket == (n, n)
        assert all(status == NOT_MEMBER for status in result.verdicts.values())

    @pytest.mark.parametrize("A", [
        T3,
        arrowhead(5),
        SymMatrix(np.ones((4, 4))),
        SymMatrix(np.eye(4) * 4 + np.ones((4, 4))),
    ])
    def test_permutation_invariance(self, A):
        perm = np.random.default_rng(12).permutation(A.n)
        assert factor_width(A.permuted(perm)).k == factor_width(A).k

    def test_structural_bound_below_three_is_not_trusted(self, monkeypatch):
        monkeypatch.setattr(widthdec, 'structural_width_upper_bound', lambda A: (2, 'bandwidth'))
        result = factor_width(J3)
        assert tuple(result) == (3, 'exact')
        assert result.bracket == (3, 3)

    @pytest.mark.parametrize("A", [T3, SymMatrix(np.diag([1.0, 5.0])), J3])
    def test_diagonal_scaling_invariance(self, A):
        d = np.random.default_rng(9).uniform(0.5, 2.0, A.n)
        DAD = SymMatrix(A.array * np.outer(d, d))
        assert factor_width(DAD).k == factor_width(A).k

    def test_to_dict(self):
        data = factor_width(T3).to_dict()
        assert data == {'k': 2, 'exactness': 'exact', 'bracket': [2, 2], 'verdicts': {}}
