"""
Dense symmetric matrices and the basic operations every other module builds on:
PSD testing by diagonal-pivoted Cholesky, diagonal normalization, structural
statistics and Hadamard arithmetic.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import (
    BadArgs,
    DimensionMismatch,
    NegativeEntryNonIntegerPower,
    NotPSD,
    NotSymmetric,
    ZeroDiagonalNonzeroRow,
)

logger = logging.getLogger(__name__)

SYMMETRY_TOLERANCE = 1e-10


@dataclass(frozen=True)
class ToleranceConfig:
    tol_psd: float = 1e-9
    tol_recon: float = 1e-8
    tol_zero: float = 1e-12
    max_iter: int = 50000

    def __post_init__(self):
        for name in ('tol_psd', 'tol_recon', 'tol_zero'):
            if not getattr(self, name) > 0:
                raise BadArgs(f"{name} must be strictly positive")
        if self.max_iter < 1:
            raise BadArgs("max_iter must be at least 1")

    @classmethod
    def from_settings(cls, config, **overrides):
        """Build from a ``FACTOR_WIDTH``-style dict; ``None`` overrides are ignored."""
        values = {
            'tol_psd': float(config.get('TOL_PSD', cls.tol_psd)),
            'tol_recon': float(config.get('TOL_RECON', cls.tol_recon)),
            'tol_zero': float(config.get('TOL_ZERO', cls.tol_zero)),
            'max_iter': int(config.get('MAX_ITER', cls.max_iter)),
        }
        values.update({key: value for key, value in overrides.items() if value is not None})
        return cls(**values)

    def to_dict(self):
        return {
            'tol_psd': self.tol_psd,
            'tol_recon': self.tol_recon,
            'tol_zero': self.tol_zero,
            'max_iter': self.max_iter,
        }


DEFAULT_TOLERANCE = ToleranceConfig()


class SymMatrix:
    """Immutable dense real symmetric matrix.

    Only the upper triangle of the input is kept; the lower triangle is
    mirrored from it so that ``A[i, j]`` and ``A[j, i]`` are the same float.
    The tolerance configuration travels with the matrix and is what the
    structural queries (bandwidth, support, nnzu) use for zero classification.
    """

    __slots__ = ('_a', 'tol')

    def __init__(self, values, tol=None, check_symmetry=True):
        a = np.array(values, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise DimensionMismatch(f"expected a non-empty square matrix, got shape {a.shape}")
        if check_symmetry:
            deviation = np.abs(a - a.T).max()
            if deviation > SYMMETRY_TOLERANCE * np.abs(a).max():
                raise NotSymmetric(f"matrix is not symmetric (max deviation {deviation:.3e})")
        upper = np.triu(a)
        full = upper + np.triu(upper, 1).T
        full.flags.writeable = False
        self._a = full
        self.tol = tol or DEFAULT_TOLERANCE

    @classmethod
    def from_upper(cls, n, entries, tol=None):
        """Build from ``(i, j, value)`` triples with ``i <= j`` (0-based)."""
        a = np.zeros((n, n))
        for i, j, value in entries:
            if not (0 <= i <= j < n):
                raise DimensionMismatch(f"entry ({i}, {j}) outside the upper triangle of a {n}x{n} matrix")
            a[i, j] = value
            a[j, i] = value
        return cls(a, tol=tol)

    @property
    def n(self):
        return self._a.shape[0]

    @property
    def array(self):
        return self._a

    def __getitem__(self, index):
        return self._a[index]

    def __repr__(self):
        return f"SymMatrix(n={self.n}, {self._a.tolist()!r})"

    def to_list(self):
        return self._a.tolist()

    def packed(self):
        """The n(n+1)/2 stored entries, row by row."""
        return self._a[np.triu_indices(self.n)]

    def diag(self):
        return self._a.diagonal().copy()

    def frobenius(self):
        return float(np.linalg.norm(self._a))

    def max_diag(self):
        return float(self._a.diagonal().max())

    def is_zero(self, value):
        return abs(value) <= self.tol.tol_zero

    def nonzero_mask(self):
        return np.abs(self._a) > self.tol.tol_zero

    def off_diagonal_all_nonzero(self):
        mask = self.nonzero_mask()
        np.fill_diagonal(mask, True)
        return bool(mask.all())

    def with_tol(self, tol):
        return SymMatrix(self._a, tol=tol, check_symmetry=False)

    def permuted(self, perm):
        """Return P A P^T where row i of the result is row ``perm[i]`` of A."""
        perm = np.asarray(perm)
        return SymMatrix(self._a[np.ix_(perm, perm)], tol=self.tol, check_symmetry=False)

    def principal(self, indices):
        indices = np.asarray(indices, dtype=int)
        return SymMatrix(self._a[np.ix_(indices, indices)], tol=self.tol, check_symmetry=False)


@dataclass(frozen=True)
class CholeskyResult:
    success: bool
    factor: np.ndarray
    rank: int
    min_pivot: float
    perm: np.ndarray

    def reconstruct(self):
        """L L^T mapped back to the original index order."""
        llt = self.factor @ self.factor.T
        out = np.empty_like(llt)
        out[np.ix_(self.perm, self.perm)] = llt
        return out


def is_psd(A, cfg=None):
    """Diagonal-pivoted Cholesky; total function.

    Pivots are accepted while the largest remaining diagonal entry exceeds
    ``tol_psd * max_diag``. When the factorization stops early the remaining
    Schur complement must be negligible (no entry larger than that threshold
    in magnitude), otherwise the matrix is reported as not PSD.
    """
    cfg = cfg or A.tol
    n = A.n
    S = A.array.copy()
    L = np.zeros((n, n))
    perm = np.arange(n)
    threshold = cfg.tol_psd * max(A.max_diag(), 0.0)

    rank = 0
    min_pivot = math.inf
    success = True
    for i in range(n):
        j = i + int(np.argmax(S.diagonal()[i:]))
        pivot = S[j, j]
        if pivot <= threshold:
            rest = S[i:, i:]
            min_pivot = min(min_pivot, float(rest.diagonal().min()))
            if rest.diagonal().min() < -threshold or np.abs(rest).max() > threshold:
                success = False
            break

        # Symmetric row/column permutation.
        if j != i:
            S[:, [i, j]] = S[:, [j, i]]
            S[[i, j], :] = S[[j, i], :]
            L[[i, j], :i] = L[[j, i], :i]
            perm[[i, j]] = perm[[j, i]]

        L[i, i] = math.sqrt(pivot)
        L[i + 1:, i] = S[i + 1:, i] / L[i, i]
        S[i + 1:, i + 1:] -= np.outer(L[i + 1:, i], L[i + 1:, i])
        rank += 1
        min_pivot = min(min_pivot, float(pivot))

    if min_pivot == math.inf:
        min_pivot = 0.0
    return CholeskyResult(success=success, factor=L, rank=rank, min_pivot=min_pivot, perm=perm)


def require_psd(A, cfg=None):
    result = is_psd(A, cfg)
    if not result.success:
        raise NotPSD(f"matrix is not positive semidefinite (min pivot {result.min_pivot:.3e})")
    return result


def psd_rank(A, cfg=None):
    return require_psd(A, cfg).rank


@dataclass(frozen=True)
class NormalizedMatrix:
    d: np.ndarray
    B: SymMatrix
    kept: tuple

    def restore(self, n):
        """D^{-1} B D^{-1}, with the dropped rows and columns put back as zeros."""
        kept = np.asarray(self.kept, dtype=int)
        inv = 1.0 / self.d[kept]
        out = np.zeros((n, n))
        out[np.ix_(kept, kept)] = self.B.array * np.outer(inv, inv)
        return SymMatrix(out, tol=self.B.tol, check_symmetry=False)


def diagonal_normalize(A):
    """Scale to unit diagonal, dropping indices whose diagonal entry is zero.

    A zero diagonal entry of a PSD matrix forces its whole row and column to be
    zero, so such an index carries no information and is dropped.
    """
    tol = A.tol.tol_zero
    diag = A.array.diagonal()
    d = np.zeros(A.n)
    kept = []
    for i in range(A.n):
        if diag[i] > tol:
            d[i] = 1.0 / math.sqrt(diag[i])
            kept.append(i)
            continue
        if diag[i] < -tol:
            raise NotPSD(f"negative diagonal entry a({i + 1},{i + 1}) = {diag[i]:.6g}")
        if np.abs(A.array[i]).max() > tol:
            raise ZeroDiagonalNonzeroRow(f"a({i + 1},{i + 1}) is zero but row {i + 1} is not")

    idx = np.asarray(kept, dtype=int)
    scaled = A.array[np.ix_(idx, idx)] * np.outer(d[idx], d[idx])
    np.fill_diagonal(scaled, 1.0)
    if not kept:
        logger.debug("diagonal_normalize: every index dropped")
        scaled = np.zeros((1, 1))
    return NormalizedMatrix(d=d, B=SymMatrix(scaled, tol=A.tol, check_symmetry=False), kept=tuple(kept))


def bandwidth(A):
    rows, cols = np.nonzero(A.nonzero_mask())
    if rows.size == 0:
        return 1
    return int(np.abs(rows - cols).max()) + 1


def nnz_stats(A):
    mask = np.triu(A.nonzero_mask(), 1)
    nnzu = int(mask.sum())
    return nnzu, 2 * nnzu


def comparison_matrix(A):
    m = -np.abs(A.array)
    np.fill_diagonal(m, np.abs(A.array.diagonal()))
    return SymMatrix(m, tol=A.tol, check_symmetry=False)


def is_diagonally_dominant(A, slack=0.0):
    a = np.abs(A.array)
    off = a.sum(axis=1) - a.diagonal()
    return bool(np.all(A.array.diagonal() + slack >= off))


def is_scaled_diagonally_dominant(A, cfg=None):
    """Existence of a positive diagonal D with DAD diagonally dominant.

    Decided by the comparison matrix being PSD, after the cheap check for plain
    diagonal dominance. A negative diagonal entry rules it out.
    """
    if (A.array.diagonal() < -A.tol.tol_zero).any():
        return False
    if is_diagonally_dominant(A):
        return True
    return is_psd(comparison_matrix(A), cfg or A.tol).success


def is_integer(s):
    return float(s).is_integer()


def hadamard_product(A, B):
    if A.n != B.n:
        raise DimensionMismatch(f"cannot multiply {A.n}x{A.n} and {B.n}x{B.n} entrywise")
    return SymMatrix(A.array * B.array, tol=A.tol, check_symmetry=False)


def hadamard_power(A, s):
    if not s > 0:
        raise BadArgs(f"Hadamard power must be positive, got {s}")
    if is_integer(s):
        return SymMatrix(A.array ** int(s), tol=A.tol, check_symmetry=False)
    if (A.array < -A.tol.tol_zero).any():
        raise NegativeEntryNonIntegerPower(f"non-integer power {s} of a matrix with negative entries")
    return SymMatrix(np.clip(A.array, 0.0, None) ** float(s), tol=A.tol, check_symmetry=False)
