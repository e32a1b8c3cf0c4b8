"""
Bounds on the factor-width-k rank fran_k(A), each tagged with where it came
from, and the exact case analysis for matrices of size at most four.
"""
import itertools
import logging
import math
from dataclasses import dataclass, replace
from typing import Optional

from . import decomp
from .covering import DEFAULT_BUDGET, clique_cover_number, covering_number, schonheim_bound
from .exceptions import (
    BadBlockStructure,
    BadK,
    FactorWidthError,
    NotFactorWidthK,
    PreconditionError,
    ReconstructionFailed,
    TooLarge,
)
from .matcore import bandwidth, diagonal_normalize, nnz_stats, psd_rank, require_psd
from .specgraph import min_bandwidth_permutation, support_graph
from .widthdec import (
    MEMBER,
    NOT_MEMBER,
    factor_width,
    factor_width_1,
    factor_width_le_2,
    membership,
    structural_width_upper_bound,
)

logger = logging.getLogger(__name__)

BOUNDS_MEMBERSHIP_SWEEPS = 2000
MEMBERSHIP_LIMIT = 10
N_LIMIT = 8


@dataclass(frozen=True)
class Bound:
    value: int
    source: str

    def to_dict(self):
        return {'value': self.value, 'source': self.source}


@dataclass(frozen=True)
class BoundsReport:
    k: int
    lower: tuple
    upper: tuple
    exact: Optional[int] = None
    notes: tuple = ()

    @classmethod
    def collapse(cls, k, lower, upper, notes=()):
        lo = max(b.value for b in lower)
        hi = min(b.value for b in upper)
        if lo > hi:
            logger.error("bounds cross for k=%d: lower %d > upper %d", k, lo, hi)
        return cls(k=k, lower=tuple(lower), upper=tuple(upper), exact=lo if lo == hi else None, notes=tuple(notes))

    def lower_value(self):
        return max(b.value for b in self.lower)

    def upper_value(self):
        return min(b.value for b in self.upper)

    def to_dict(self):
        return {
            'k': self.k,
            'lower': [b.to_dict() for b in self.lower],
            'upper': [b.to_dict() for b in self.upper],
            'exact': self.exact,
            'notes': list(self.notes),
        }


@dataclass(frozen=True)
class SmallRankResult:
    k: int
    lo: int
    hi: int
    trace: tuple

    @property
    def exact(self):
        return self.lo if self.lo == self.hi else None

    def to_dict(self):
        result = {'exact': self.exact} if self.exact is not None else {'range': [self.lo, self.hi]}
        return {'k': self.k, 'result': result, 'trace': list(self.trace)}


def _check_k(A, k):
    if not 1 <= k <= A.n:
        raise BadK(f"k must lie in 1..{A.n}, got {k}")


def _capped(cfg):
    return replace(cfg, max_iter=min(cfg.max_iter, BOUNDS_MEMBERSHIP_SWEEPS))


# ==================== CONSTRUCTIONS ====================

def constructive_decompositions(A, k, cfg=None, n_limit=N_LIMIT):
    """Yield ``(source, decomposition)`` for every construction that applies.

    Order: banded, permuted-banded, arrowhead, dd-equality, block-overlap,
    fw2-optimal. Constructions whose preconditions fail are skipped.
    """
    cfg = cfg or A.tol
    attempts = [('banded', lambda: decomp.decompose_banded(A, k, cfg))]
    if bandwidth(A) > k and A.n <= n_limit:
        attempts.append(('permuted-banded', lambda: decomp.decompose_permuted_banded(A, k, n_limit, cfg)))
    if k >= 2:
        centre = decomp.arrowhead_centre(A)
        if centre is not None:
            attempts.append(('arrowhead', lambda: decomp.decompose_arrowhead(A, centre, cfg)))
        attempts.append(('dd-equality', lambda: decomp.decompose_dd_equality(A, cfg)))
        attempts.append(('block-overlap', lambda: _block_overlap(A, cfg)))
        attempts.append(('fw2-optimal', lambda: decomp.decompose_fw2_optimal(A, cfg)))

    for source, attempt in attempts:
        try:
            decomposition = attempt()
        except PreconditionError as exc:
            logger.debug("construction %s skipped: %s", source, exc.code)
            continue
        except ReconstructionFailed as exc:
            logger.warning("construction %s rejected: %s", source, exc)
            continue
        if decomposition.residual > cfg.tol_recon or decomposition.max_support() > k:
            logger.warning("construction %s rejected: residual %.3e", source, decomposition.residual)
            continue
        yield source, decomposition


def _block_overlap(A, cfg):
    cuts = decomp.find_overlap_cuts(A)
    if not cuts:
        raise BadBlockStructure("single block")
    return decomp.decompose_block_overlap(A, cuts, cfg)


# ==================== BOUNDS ====================

def fran_lower_bounds(A, k, cfg=None, budget=DEFAULT_BUDGET):
    cfg = cfg or A.tol
    _check_k(A, k)
    n = A.n
    bounds = [Bound(psd_rank(A, cfg), 'rank')]
    if k < 2:
        return bounds

    nnzu, _ = nnz_stats(A)
    bounds.append(Bound(math.ceil(2 * nnzu / (k * (k - 1))), 'nnzu'))

    G = support_graph(A)
    complete = len(G.edges) == math.comb(n, 2)
    covering = None
    if complete:
        covering = covering_number(n, k, budget)
        if covering.certified:
            bounds.append(Bound(covering.value, 'covering'))
        else:
            bounds.append(Bound(schonheim_bound(n, k), 'schonheim'))
    if G.edges:
        cover = covering if complete else clique_cover_number(G, k, budget)
        if cover.certified:
            bounds.append(Bound(cover.value, 'cliquecover'))
        else:
            logger.info("clique cover not certified within budget, greedy %d kept out of lower bounds", cover.value)
    return bounds


def fran_upper_bounds(A, k, cfg=None, n_limit=N_LIMIT, membership_limit=MEMBERSHIP_LIMIT, verdict=None):
    cfg = cfg or A.tol
    _check_k(A, k)
    n = A.n
    bounds = [Bound(k * math.comb(n, k), 'blocks'), Bound(n * (n + 1) // 2, 'caratheodory')]
    if k == n:
        bounds.append(Bound(psd_rank(A, cfg), 'full-block'))
    for source, decomposition in constructive_decompositions(A, k, cfg, n_limit):
        bounds.append(Bound(decomposition.term_count(), source))

    if 2 <= k < n and n <= membership_limit:
        if verdict is None:
            verdict = membership(A, k, _capped(cfg))
        if verdict.status == MEMBER:
            bounds.append(Bound(verdict.certificate.term_count(), 'membership'))
    return bounds


def _width_verdict(A, k, cfg, membership_limit):
    """Confirm factor width <= k; returns the solver verdict when one was run."""
    if k == 1:
        ok = factor_width_1(A)
    elif k == 2 or factor_width_le_2(A):
        ok = factor_width_le_2(A)
    elif structural_width_upper_bound(A)[0] <= k:
        ok = True
    elif A.n <= membership_limit:
        verdict = membership(A, k, _capped(cfg))
        if verdict.status == NOT_MEMBER:
            raise NotFactorWidthK(f"factor width exceeds {k} (verified witness)")
        return verdict, [] if verdict.status == MEMBER else [f"factor width <= {k} not confirmed"]
    else:
        return None, [f"factor width <= {k} not checked above n = {membership_limit}"]
    if not ok:
        raise NotFactorWidthK(f"factor width exceeds {k}")
    return None, []


def bounds_report(A, k, cfg=None, budget=DEFAULT_BUDGET, n_limit=N_LIMIT, membership_limit=MEMBERSHIP_LIMIT):
    cfg = cfg or A.tol
    _check_k(A, k)
    require_psd(A, cfg)
    verdict, notes = _width_verdict(A, k, cfg, membership_limit)
    lower = fran_lower_bounds(A, k, cfg, budget)
    upper = fran_upper_bounds(A, k, cfg, n_limit, membership_limit, verdict)
    return BoundsReport.collapse(k, lower, upper, notes)


# ==================== SMALL MATRICES ====================

# Support patterns of 4x4 width-two matrices not handled by the earlier rules.
REFERENCE_PATTERNS = {
    'arrowhead': frozenset({(0, 1), (0, 2), (0, 3)}),
    'overlap': frozenset({(0, 1), (1, 2), (1, 3), (2, 3)}),
    'block-diagonal': frozenset({(0, 1), (0, 2), (1, 2)}),
    'pentadiagonal': frozenset({(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)}),
    'cyclic': frozenset({(0, 1), (1, 2), (2, 3), (0, 3)}),
}


def match_pattern(G):
    """First reference pattern G equals after some relabelling, with that relabelling."""
    for name, edges in REFERENCE_PATTERNS.items():
        if len(edges) != len(G.edges):
            continue
        for perm in itertools.permutations(range(G.n)):
            if G.relabeled(perm).edges == edges:
                return name, perm
    return None, None


def _exact(k, value, trace, rule):
    return SmallRankResult(k=k, lo=value, hi=value, trace=tuple(trace + [rule]))


def _from_bounds(k, report, trace, rule):
    if report.exact is not None:
        return _exact(k, report.exact, trace + [rule], 'bounds-meet')
    return SmallRankResult(k=k, lo=report.lower_value(), hi=report.upper_value(), trace=tuple(trace + [rule]))


def fran_exact_small(A, cfg=None, budget=DEFAULT_BUDGET):
    """fran_k(A) at k = factor width of A, for n <= 4."""
    cfg = cfg or A.tol
    if A.n > 4:
        raise TooLarge(f"exact small-matrix analysis needs n <= 4, got {A.n}")
    require_psd(A, cfg)
    trace = []
    norm = diagonal_normalize(A)
    if len(norm.kept) < A.n:
        dropped = [i + 1 for i in range(A.n) if i not in norm.kept]
        trace.append(f"dropped zero rows {dropped}")
    if not norm.kept:
        return _exact(1, 0, trace, 'zero matrix')

    R = A.principal(list(norm.kept))
    n = R.n
    width = factor_width(R, cfg)
    k = width.k
    trace.append(f"factor width {k} ({width.exactness})")
    if width.bracket[0] != width.bracket[1]:
        trace.append(f"factor width bracket {list(width.bracket)}")
        return _from_bounds(k, bounds_report(R, k, cfg, budget), trace, 'range from bounds')

    rank = psd_rank(R, cfg)
    if n <= 2:
        return _exact(k, rank, trace, 'n <= 2: rank')
    if k in (1, n):
        return _exact(k, rank, trace, f"k = {k}: rank")

    G = support_graph(R)
    complete = len(G.edges) == math.comb(n, 2)
    if n == 3:
        if complete:
            return _exact(k, 3, trace, 'all-nonzero: nnzu')
        return _exact(k, rank, trace, 'permuted-tridiagonal: rank')

    if k == 3:
        if not complete:
            return _exact(k, rank, trace, 'zero off-diagonal: bandwidth-3 permutation, rank')
        return _from_bounds(k, bounds_report(R, 3, cfg, budget), trace, 'all-nonzero width 3: range')

    if complete:
        return _exact(k, 6, trace, 'all-nonzero: nnzu')
    if min_bandwidth_permutation(R, n_limit=4).band <= 2:
        return _exact(k, rank, trace, 'permuted-tridiagonal: rank')

    name, perm = match_pattern(G)
    if name == 'arrowhead':
        return _exact(k, rank, trace, 'arrowhead: rank')
    if name == 'overlap':
        P = R.permuted(perm)
        decomposition = decomp.decompose_block_overlap(P, decomp.find_overlap_cuts(P), cfg)
        return _exact(k, decomposition.term_count(), trace, 'overlapping blocks: nnzu')
    if name == 'block-diagonal':
        total = 0
        for component in G.components():
            part = fran_exact_small(R.principal(component), cfg, budget)
            total += part.lo
        return _exact(k, total, trace, 'block-diagonal: sum over blocks')
    if name in ('pentadiagonal', 'cyclic'):
        return _from_bounds(k, bounds_report(R, 2, cfg, budget), trace, f"{name}: range from bounds")
    raise FactorWidthError(f"unclassified 4x4 support pattern {G.sorted_edges()}")
