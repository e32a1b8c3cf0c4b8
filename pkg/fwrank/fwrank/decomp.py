"""
Constructive factor-width-k decompositions.

Each constructor returns an FWDecomposition whose term count realizes (or
bounds) the factor-width-k rank for the matrix class it handles: banded
Cholesky, the tridiagonal Schur recurrence, arrowheads, diagonally dominant
matrices with equality, the all-nonzero-triple construction for width two,
and overlapping-block splitting.
"""
import itertools
import logging
import math
from dataclasses import dataclass, replace

import numpy as np

from .exceptions import (
    BadArgs,
    BadBlockStructure,
    BadSeed,
    BandTooWide,
    HypothesisFailed,
    InconsistentZeroPivot,
    NotArrowhead,
    NotDDEquality,
    NotFactorWidth2,
    NotPSD,
    NotTridiagonal,
    ReconstructionFailed,
    TargetNotAboveOne,
    ZeroDiagonalNonzeroRow,
)
from .matcore import (
    DEFAULT_TOLERANCE,
    SymMatrix,
    bandwidth,
    comparison_matrix,
    diagonal_normalize,
    is_integer,
    is_scaled_diagonally_dominant,
    require_psd,
)
from .specgraph import min_bandwidth_permutation, support_graph

logger = logging.getLogger(__name__)

DD_INFLATION = 1e-10
CORNER_TOL_PSD = 1e-13
CORNER_RTOL = 1e-15


@dataclass(frozen=True)
class SparseVector:
    n: int
    support: tuple
    values: tuple

    def __post_init__(self):
        if not self.support or len(self.support) != len(self.values):
            raise BadArgs("sparse vector needs a non-empty support aligned with its values")
        if any(b <= a for a, b in zip(self.support, self.support[1:])):
            raise BadArgs("sparse vector support must be strictly increasing")
        if self.support[0] < 0 or self.support[-1] >= self.n:
            raise BadArgs(f"support {self.support} outside dimension {self.n}")

    @classmethod
    def from_dense(cls, x, tol_zero=DEFAULT_TOLERANCE.tol_zero):
        """None when every entry is a structural zero."""
        x = np.asarray(x, dtype=float)
        idx = np.nonzero(np.abs(x) > tol_zero)[0]
        if idx.size == 0:
            return None
        return cls(n=x.shape[0], support=tuple(idx.tolist()), values=tuple(float(v) for v in x[idx]))

    @property
    def size(self):
        return len(self.support)

    def to_dense(self):
        x = np.zeros(self.n)
        x[list(self.support)] = self.values
        return x

    def remapped(self, mapping, n):
        """Send index i to ``mapping[i]`` in a vector of dimension ``n``."""
        pairs = sorted((int(mapping[i]), v) for i, v in zip(self.support, self.values))
        return SparseVector(n=n, support=tuple(p[0] for p in pairs), values=tuple(p[1] for p in pairs))

    def to_dict(self):
        return {'support': [i + 1 for i in self.support], 'values': list(self.values)}


def _relative_residual(target, recon):
    norm = np.linalg.norm(target)
    if norm == 0:
        return float(np.linalg.norm(recon))
    return float(np.linalg.norm(target - recon) / norm)


@dataclass(frozen=True)
class FWDecomposition:
    n: int
    k: int
    vectors: tuple
    residual: float
    method: str = ''
    notes: tuple = ()

    @classmethod
    def build(cls, target, k, vectors, method='', notes=()):
        target = target.array if isinstance(target, SymMatrix) else np.asarray(target, dtype=float)
        vectors = tuple(v for v in vectors if v is not None)
        decomposition = cls(n=target.shape[0], k=k, vectors=vectors, residual=0.0, method=method, notes=tuple(notes))
        residual = _relative_residual(target, decomposition.reconstruct())
        return replace(decomposition, residual=residual)

    def term_count(self):
        return len(self.vectors)

    def max_support(self):
        return max((v.size for v in self.vectors), default=0)

    def reconstruct(self):
        out = np.zeros((self.n, self.n))
        for v in self.vectors:
            x = v.to_dense()
            out += np.outer(x, x)
        return out

    def to_dict(self):
        return {
            'k': self.k,
            'method': self.method,
            'term_count': self.term_count(),
            'terms': [v.to_dict() for v in self.vectors],
            'residual': self.residual,
            'notes': list(self.notes),
        }


def _pivot_threshold(A, cfg):
    return cfg.tol_psd * max(A.max_diag(), 0.0)


def _check_zero_rows(A):
    tol = A.tol.tol_zero
    for i, value in enumerate(A.array.diagonal()):
        if value < -tol:
            raise NotPSD(f"negative diagonal entry a({i + 1},{i + 1}) = {value:.6g}")
        if value <= tol and np.abs(A.array[i]).max() > tol:
            raise ZeroDiagonalNonzeroRow(f"a({i + 1},{i + 1}) is zero but row {i + 1} is not")


# ==================== BANDED ====================

def decompose_banded(A, k, cfg=None):
    """Pivotless band Cholesky; zero pivots give zero columns and are skipped."""
    cfg = cfg or A.tol
    if k < 1:
        raise BadArgs(f"k must be positive, got {k}")
    width = bandwidth(A)
    if width > k:
        raise BandTooWide(f"bandwidth {width} exceeds k = {k}")
    require_psd(A, cfg)

    n = A.n
    S = A.array.copy()
    threshold = _pivot_threshold(A, cfg)
    vectors = []
    for j in range(n):
        pivot = S[j, j]
        if pivot <= threshold:
            continue
        col = S[j:, j] / math.sqrt(pivot)
        S[j:, j:] -= np.outer(col, col)
        x = np.zeros(n)
        x[j:] = col
        vectors.append(SparseVector.from_dense(x, A.tol.tol_zero))
    return FWDecomposition.build(A, k, vectors, method='banded')


def decompose_permuted_banded(A, k, n_limit=8, cfg=None):
    """Relabel to minimal bandwidth, then band Cholesky, then map supports back."""
    cfg = cfg or A.tol
    perm, band, _ = min_bandwidth_permutation(A, n_limit=n_limit)
    if band > k:
        raise BandTooWide(f"minimal bandwidth {band} exceeds k = {k}")
    inner = decompose_banded(A.permuted(perm), k, cfg)
    vectors = [v.remapped(perm, A.n) for v in inner.vectors]
    return FWDecomposition.build(A, k, vectors, method='permuted-banded',
                                 notes=[f"permutation {[p + 1 for p in perm]}"])


def tridiagonal_pivots(A, cfg=None):
    return _tridiagonal_sweep(A, cfg or A.tol)[1]


def _tridiagonal_sweep(A, cfg):
    if bandwidth(A) > 2:
        raise NotTridiagonal(f"bandwidth {bandwidth(A)} exceeds 2")
    n = A.n
    a = A.array.diagonal()
    b = [A.array[i, i + 1] for i in range(n - 1)]
    threshold = _pivot_threshold(A, cfg)
    slack = math.sqrt(threshold * max(A.max_diag(), 0.0))

    vectors, pivots = [], []
    s = a[0]
    for i in range(n):
        if s < -threshold:
            raise NotPSD(f"negative Schur complement {s:.6g} at index {i + 1}")
        pivots.append(float(s))
        if i == n - 1:
            if s > threshold:
                x = np.zeros(n)
                x[i] = math.sqrt(s)
                vectors.append(SparseVector.from_dense(x, A.tol.tol_zero))
            break
        bi = b[i] if abs(b[i]) > A.tol.tol_zero else 0.0
        if s <= threshold:
            if abs(bi) > slack:
                raise InconsistentZeroPivot(f"zero pivot at index {i + 1} with off-diagonal {bi:.6g}")
            s = a[i + 1]
            continue
        root = math.sqrt(s)
        x = np.zeros(n)
        x[i] = root
        x[i + 1] = bi / root
        vectors.append(SparseVector.from_dense(x, A.tol.tol_zero))
        s = a[i + 1] - bi * bi / s
    return vectors, pivots


def decompose_tridiagonal(A, cfg=None):
    """Schur-complement recurrence s_1 = a_1, s_k = a_k - b_{k-1}^2 / s_{k-1}.

    The recurrence doubles as the PSD test: a negative complement means the
    input is not PSD and a zero one with a nonzero coupling is inconsistent.
    """
    vectors, _ = _tridiagonal_sweep(A, cfg or A.tol)
    return FWDecomposition.build(A, 2, vectors, method='tridiagonal')


# ==================== ARROWHEAD ====================

def arrowhead_centre(A):
    """Smallest index that every off-diagonal nonzero touches, or None."""
    rows, cols = np.nonzero(np.triu(A.nonzero_mask(), 1))
    if rows.size == 0:
        return 0
    common = set(range(A.n))
    for i, j in zip(rows.tolist(), cols.tolist()):
        common &= {i, j}
    return min(common) if common else None


def decompose_arrowhead(A, centre=0, cfg=None):
    cfg = cfg or A.tol
    tol = A.tol.tol_zero
    rows, cols = np.nonzero(np.triu(A.nonzero_mask(), 1))
    for i, j in zip(rows.tolist(), cols.tolist()):
        if centre not in (i, j):
            raise NotArrowhead(f"nonzero a({i + 1},{j + 1}) away from row/column {centre + 1}")
    _check_zero_rows(A)

    n = A.n
    a = A.array
    threshold = _pivot_threshold(A, cfg)
    vectors = []
    surplus = a[centre, centre]
    for i in range(n):
        if i == centre or a[i, i] <= tol:
            continue
        root = math.sqrt(a[i, i])
        x = np.zeros(n)
        x[i] = root
        x[centre] = a[centre, i] / root
        surplus -= a[centre, i] ** 2 / a[i, i]
        vectors.append(SparseVector.from_dense(x, tol))
    if surplus < -threshold:
        raise NotPSD(f"arrowhead corner surplus {surplus:.6g} is negative")
    if surplus > threshold:
        x = np.zeros(n)
        x[centre] = math.sqrt(surplus)
        vectors.append(SparseVector.from_dense(x, tol))
    return FWDecomposition.build(A, 2, vectors, method='arrowhead')


# ==================== DIAGONAL DOMINANCE ====================

def _edge_vector(n, i, j, value, tol):
    root = math.sqrt(abs(value))
    x = np.zeros(n)
    x[i] = math.copysign(root, value)
    x[j] = root
    return SparseVector.from_dense(x, tol)


def decompose_dd_equality(A, cfg=None):
    """v_ij = sqrt|a_ij| (sgn(a_ij) e_i + e_j) for each nonzero a_ij, i < j."""
    cfg = cfg or A.tol
    a = A.array
    abs_a = np.abs(a)
    off = abs_a.sum(axis=1) - abs_a.diagonal()
    scale = max(A.max_diag(), A.tol.tol_zero)
    for j in range(A.n):
        if abs(a[j, j] - off[j]) > cfg.tol_recon * scale:
            raise NotDDEquality(f"row {j + 1}: diagonal {a[j, j]:.6g} vs off-diagonal sum {off[j]:.6g}")

    rows, cols = np.nonzero(np.triu(A.nonzero_mask(), 1))
    vectors = [_edge_vector(A.n, i, j, a[i, j], A.tol.tol_zero) for i, j in zip(rows.tolist(), cols.tolist())]
    return FWDecomposition.build(A, 2, vectors, method='dd-equality')


def _dd_scaling(B, cfg):
    """Positive d with diag(d) B diag(d) diagonally dominant, B unit-diagonal SDD.

    Per connected component: solve M d = 1 for the comparison matrix M when it
    is positive definite, otherwise take the Perron vector of its smallest
    eigenvalue. Components where neither works use a slightly inflated M.
    """
    m = B.n
    d = np.ones(m)
    inflated = False
    M = comparison_matrix(B).array
    for component in support_graph(B).components():
        if len(component) == 1:
            continue
        idx = np.asarray(component)
        Mc = M[np.ix_(idx, idx)]
        ones = np.ones(len(idx))
        w, V = np.linalg.eigh(Mc)
        if w[0] > cfg.tol_psd:
            dc = np.linalg.solve(Mc, ones)
        else:
            dc = np.abs(V[:, 0])
        if not _is_dd_scaling(Mc, dc, cfg):
            dc = np.linalg.solve(Mc + DD_INFLATION * np.eye(len(idx)), ones)
            inflated = True
            if not _is_dd_scaling(Mc, dc, cfg):
                raise NotFactorWidth2("no diagonal scaling makes the matrix diagonally dominant")
        d[idx] = dc / dc.max()
    if inflated:
        logger.warning("dd scaling: fell back to diagonal inflation %.0e", DD_INFLATION)
    return d, inflated


def _is_dd_scaling(M, d, cfg):
    if not np.all(d > 0):
        return False
    return bool(np.all(d * (M @ d) >= -cfg.tol_psd * d.max() ** 2))


def _scaled_dd_parts(A, cfg):
    """Normalize, scale to diagonal dominance and split off the row surpluses."""
    require_psd(A, cfg)
    if not is_scaled_diagonally_dominant(A, cfg):
        raise NotFactorWidth2("comparison matrix is not positive semidefinite")
    norm = diagonal_normalize(A)
    if not norm.kept:
        return norm, np.zeros(0), np.zeros((0, 0)), np.zeros(0), False
    d, inflated = _dd_scaling(norm.B, cfg)
    C = norm.B.array * np.outer(d, d)
    surplus = d * (comparison_matrix(norm.B).array @ d)
    return norm, d, C, surplus, inflated


def _unscale(vectors, norm, d, n):
    kept = np.asarray(norm.kept, dtype=int)
    factor = 1.0 / (d * norm.d[kept])
    out = []
    for x in vectors:
        full = np.zeros(n)
        full[kept] = x * factor
        out.append(full)
    return out


def decompose_scaled_dd(A, cfg=None):
    """Width-two decomposition of any scaled diagonally dominant PSD matrix.

    One term per nonzero off-diagonal pair plus one singleton per strictly
    positive row surplus; this is the general construction, not a minimal one.
    """
    cfg = cfg or A.tol
    norm, d, C, surplus, inflated = _scaled_dd_parts(A, cfg)
    m = len(norm.kept)
    tol = A.tol.tol_zero
    dense = []
    for i, j in itertools.combinations(range(m), 2):
        if abs(C[i, j]) > tol:
            dense.append(_edge_vector(m, i, j, C[i, j], tol).to_dense())
    scale = float((d ** 2).max()) if m else 0.0
    for i in range(m):
        if surplus[i] > cfg.tol_psd * scale:
            x = np.zeros(m)
            x[i] = math.sqrt(surplus[i])
            dense.append(x)
    vectors = [SparseVector.from_dense(x, tol) for x in _unscale(dense, norm, d, A.n)]
    notes = ['dd scaling inflated'] if inflated else []
    return FWDecomposition.build(A, 2, vectors, method='scaled-dd', notes=notes)


# ==================== THREE-BY-THREE ADJUSTMENT ====================

def _triple_sum(u, v, w):
    return np.outer(u, u) + np.outer(v, v) + np.outer(w, w)


def _xi_family(a, b, c, x, y, z, xi):
    Z = z * z + b * b * (1.0 / (x * x) - 1.0 / (xi * xi))
    Y = y * y + c * c * (1.0 / (z * z) - 1.0 / Z)
    u = np.array([a / math.sqrt(Y), math.sqrt(Y), 0.0])
    v = np.array([xi, 0.0, b / xi])
    w = np.array([0.0, c / math.sqrt(Z), math.sqrt(Z)])
    return u, v, w


def adjust_3x3_diagonal(a, b, c, x, y, z, target, tol=None):
    """Raise the (1,1) entry of a three-term width-two decomposition to ``target``.

    The seed is u = (a/y, y, 0), v = (x, 0, b/x), w = (0, c/z, z), summing to the
    unit-diagonal matrix with off-diagonals a, b, c. For xi >= |x| the family

        v_xi = (xi, 0, b/xi)
        w_xi = (0, c/sqrt(Z), sqrt(Z)),  Z = z^2 + b^2 (1/x^2 - 1/xi^2)
        u_xi = (a/sqrt(Y), sqrt(Y), 0),  Y = y^2 + c^2 (1/z^2 - 1/Z)

    keeps every entry except (1,1) fixed, and the (1,1) entry runs continuously
    from 1 to infinity. xi is found by bisection on the realized entry.
    """
    tol = tol or DEFAULT_TOLERANCE
    if not target > 1:
        raise TargetNotAboveOne(f"target must exceed 1, got {target}")
    if min(abs(a), abs(b), abs(c), abs(x), abs(y), abs(z)) <= tol.tol_zero:
        raise BadSeed("seed entries and off-diagonals must be nonzero")
    expected = np.array([[1.0, a, b], [a, 1.0, c], [b, c, 1.0]])
    seed = _triple_sum(np.array([a / y, y, 0.0]), np.array([x, 0.0, b / x]), np.array([0.0, c / z, z]))
    if np.linalg.norm(seed - expected) > tol.tol_recon * np.linalg.norm(expected):
        raise BadSeed("seed vectors do not reconstruct the unit-diagonal matrix")

    def realized(xi):
        u, v, _ = _xi_family(a, b, c, x, y, z, xi)
        return u[0] ** 2 + v[0] ** 2

    lo = abs(x)
    hi = 2.0 * lo
    for _ in range(2000):
        if realized(hi) >= target:
            break
        hi *= 2.0
    for _ in range(200):
        if hi - lo <= 1e-16 * hi:
            break
        mid = 0.5 * (lo + hi)
        if realized(mid) < target:
            lo = mid
        else:
            hi = mid

    u, v, w = _xi_family(a, b, c, x, y, z, hi)
    expected[0, 0] = target
    residual = np.linalg.norm(_triple_sum(u, v, w) - expected) / np.linalg.norm(expected)
    logger.debug("adjust_3x3_diagonal: target=%g xi=%.17g residual=%.3e", target, hi, residual)
    if not residual <= tol.tol_recon:
        raise ReconstructionFailed(
            f"adjusted terms miss the target {target:g} by relative residual {residual:.3e}"
        )
    return tuple(SparseVector.from_dense(t, tol.tol_zero) for t in (u, v, w))


# ==================== ALL-NONZERO TRIPLES ====================

def _nonzero_triples(C, tol):
    mask = np.abs(C) > tol
    return [t for t in itertools.combinations(range(C.shape[0]), 3)
            if mask[t[0], t[1]] and mask[t[0], t[2]] and mask[t[1], t[2]]]


def _absorb_surplus(vectors, triple, m, surplus, tol):
    o1, o2 = (t for t in triple if t != m)
    keys = [tuple(sorted(p)) for p in ((m, o1), (m, o2), (o1, o2))]
    idx = [m, o1, o2]
    u, v, w = (vectors[key][idx] for key in keys)

    delta = 1.0 / np.sqrt(np.diag(_triple_sum(u, v, w)))
    u, v, w = u * delta, v * delta, w * delta
    a, b, c = u[0] * u[1], v[0] * v[2], w[1] * w[2]
    target = 1.0 + surplus * delta[0] ** 2
    adjusted = adjust_3x3_diagonal(a, b, c, v[0], u[1], w[2], target, tol)
    for key, vec in zip(keys, adjusted):
        full = np.zeros_like(vectors[key])
        full[idx] = vec.to_dense() / delta
        vectors[key] = full


def decompose_fw2_optimal(A, cfg=None):
    """nnzu(A) terms for a width-two matrix whose every index lies in an
    all-nonzero 3x3 principal submatrix.

    The scaled matrix splits as a diagonally dominant matrix with equality in
    every row plus diagonal surpluses; each surplus is pushed into the three
    edge terms of the lexicographically first all-nonzero triple containing it.
    """
    cfg = cfg or A.tol
    tol = A.tol.tol_zero
    norm, d, C, surplus, inflated = _scaled_dd_parts(A, cfg)
    m = len(norm.kept)

    triples = _nonzero_triples(C, tol)
    owner = {}
    for i in range(m):
        owner[i] = next((t for t in triples if i in t), None)
        if owner[i] is None:
            raise HypothesisFailed(f"index {norm.kept[i] + 1} lies in no all-nonzero 3x3 principal submatrix")
    if m == 0:
        raise HypothesisFailed("zero matrix has no all-nonzero 3x3 principal submatrix")

    vectors = {}
    for i, j in itertools.combinations(range(m), 2):
        if abs(C[i, j]) > tol:
            vectors[(i, j)] = _edge_vector(m, i, j, C[i, j], tol).to_dense()

    scale = float((d ** 2).max())
    for i in range(m):
        if surplus[i] > cfg.tol_psd * scale:
            _absorb_surplus(vectors, owner[i], i, surplus[i], A.tol)

    dense = _unscale([vectors[key] for key in sorted(vectors)], norm, d, A.n)
    notes = ['dd scaling inflated'] if inflated else []
    return FWDecomposition.build(A, 2, [SparseVector.from_dense(x, tol) for x in dense],
                                 method='fw2-optimal', notes=notes)


# ==================== OVERLAPPING BLOCKS ====================

def _blocks_from_cuts(A, cut_indices):
    n = A.n
    cuts = sorted(set(int(c) for c in cut_indices))
    if len(cuts) != len(cut_indices) or any(not 0 < c < n - 1 for c in cuts):
        raise BadBlockStructure(f"cut indices must be distinct and strictly inside 1..{n}")
    if n < 2:
        raise BadBlockStructure("block structure needs n >= 2")
    starts = [0] + cuts
    ends = cuts + [n - 1]
    blocks = list(zip(starts, ends))

    expected = np.zeros((n, n), dtype=bool)
    for s, e in blocks:
        expected[s:e + 1, s:e + 1] = True
    actual = A.nonzero_mask()
    np.fill_diagonal(actual, True)
    if not np.array_equal(expected, actual):
        raise BadBlockStructure("support is not a chain of all-nonzero blocks overlapping in one index")
    return blocks


def find_overlap_cuts(A):
    """Cut indices of the consecutive all-nonzero blocks, in the given order."""
    n = A.n
    if n < 2:
        raise BadBlockStructure("block structure needs n >= 2")
    mask = A.nonzero_mask()
    cuts = []
    start = 0
    while start < n - 1:
        end = start + 1
        if not mask[start, end]:
            raise BadBlockStructure(f"a({start + 1},{end + 1}) is zero, blocks must be connected")
        while end + 1 < n and mask[start:end + 1, end + 1].all():
            end += 1
        if end < n - 1:
            cuts.append(end)
        start = end
    _blocks_from_cuts(A, cuts)
    return cuts


def _min_corner(block, pos, cfg):
    """Smallest corner value keeping the block scaled diagonally dominant."""
    strict = replace(cfg, tol_psd=min(cfg.tol_psd, CORNER_TOL_PSD))
    trial = block.copy()
    lo, hi = 0.0, float(block[pos, pos])
    for _ in range(200):
        if hi - lo <= CORNER_RTOL * hi:
            break
        mid = 0.5 * (lo + hi)
        trial[pos, pos] = mid
        if is_scaled_diagonally_dominant(SymMatrix(trial, check_symmetry=False), strict):
            hi = mid
        else:
            lo = mid
    return hi


def _decompose_block(block, cfg, tol):
    B = SymMatrix(block, tol=tol, check_symmetry=False)
    if B.n == 2:
        return decompose_banded(B, 2, cfg)
    return decompose_fw2_optimal(B, cfg)


def decompose_block_overlap(A, cut_indices, cfg=None):
    """Split the shared diagonal entry at each cut between the adjacent blocks.

    One block with at least three indices takes whatever is left; every other
    block receives the smallest corner share that keeps it of width two, found
    by bisection, which makes it singular on the width-two boundary and
    decomposable with exactly nnzu (or, for 2x2 blocks, one) terms.
    """
    cfg = cfg or A.tol
    require_psd(A, cfg)
    blocks = _blocks_from_cuts(A, cut_indices)
    if not is_scaled_diagonally_dominant(A, cfg):
        raise NotFactorWidth2("comparison matrix is not positive semidefinite")
    if len(blocks) == 1:
        return _decompose_block(A.array, cfg, A.tol)

    free = next((i for i, (s, e) in enumerate(blocks) if e - s >= 2), None)
    if free is None:
        logger.info("decompose_block_overlap: all blocks are 2x2, using the tridiagonal recurrence")
        return replace(decompose_tridiagonal(A, cfg), method='block-overlap')

    work = A.array.copy()
    pieces = {}
    for i in range(free):
        s, e = blocks[i]
        block = work[s:e + 1, s:e + 1].copy()
        block[-1, -1] = _min_corner(block, -1, cfg)
        work[e, e] -= block[-1, -1]
        pieces[i] = block
    for i in range(len(blocks) - 1, free, -1):
        s, e = blocks[i]
        block = work[s:e + 1, s:e + 1].copy()
        block[0, 0] = _min_corner(block, 0, cfg)
        work[s, s] -= block[0, 0]
        pieces[i] = block
    s, e = blocks[free]
    pieces[free] = work[s:e + 1, s:e + 1].copy()

    vectors = []
    for i, (s, e) in enumerate(blocks):
        inner = _decompose_block(pieces[i], cfg, A.tol)
        vectors.extend(v.remapped(range(s, e + 1), A.n) for v in inner.vectors)
    return FWDecomposition.build(A, 2, vectors, method='block-overlap',
                                 notes=[f"cuts {[c + 1 for c in sorted(cut_indices)]}"])


# ==================== HADAMARD ====================

def hadamard_product_decomposition(dA, dB):
    """Terms v_i * w_j (entrywise) of the product of two decompositions."""
    if dA.n != dB.n:
        raise BadArgs(f"dimensions differ: {dA.n} and {dB.n}")
    tol = DEFAULT_TOLERANCE.tol_zero
    vectors = []
    for v in dA.vectors:
        x = v.to_dense()
        for w in dB.vectors:
            vectors.append(SparseVector.from_dense(x * w.to_dense(), tol))
    target = dA.reconstruct() * dB.reconstruct()
    return FWDecomposition.build(target, min(dA.k, dB.k), vectors, method='hadamard-product')


def hadamard_power_decomposition(d, s):
    """One term per multiset of s vectors, scaled by the root of its multinomial."""
    if not (is_integer(s) and s >= 1):
        raise BadArgs(f"power decomposition needs an integer s >= 1, got {s}")
    s = int(s)
    tol = DEFAULT_TOLERANCE.tol_zero
    dense = [v.to_dense() for v in d.vectors]
    vectors = []
    for combo in itertools.combinations_with_replacement(range(len(dense)), s):
        counts = np.bincount(combo)
        coefficient = math.factorial(s) // math.prod(math.factorial(int(c)) for c in counts)
        x = np.sqrt(coefficient) * np.prod([dense[i] for i in combo], axis=0)
        vectors.append(SparseVector.from_dense(x, tol))
    target = d.reconstruct() ** s
    return FWDecomposition.build(target, d.k, vectors, method='hadamard-power')
