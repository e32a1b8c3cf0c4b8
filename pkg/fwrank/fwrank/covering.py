"""
Covering numbers C(n, k, 2) and k-clique cover numbers cc_k(G).

Both are set-cover problems over k-subsets of the vertices: the elements to
cover are all pairs (designs) or the edges of G (clique covers). One exact
branch-and-bound engine over integer bitmasks serves both; it starts from a
greedy incumbent and reports ``certified=False`` with that incumbent when the
node budget runs out.
"""
import itertools
import logging
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .exceptions import BadArgs
from .matcore import SymMatrix
from .specgraph import SupportGraph

logger = logging.getLogger(__name__)

DEFAULT_BUDGET = 10_000_000


@dataclass(frozen=True)
class CoveringDesign:
    n: int
    k: int
    blocks: tuple

    def to_dict(self):
        return {'n': self.n, 'k': self.k, 'blocks': [[i + 1 for i in b] for b in self.blocks]}


@dataclass(frozen=True)
class CliqueCover:
    graph: SupportGraph
    k: int
    cliques: tuple

    def to_dict(self):
        return {'k': self.k, 'graph': self.graph.to_dict(), 'cliques': [[i + 1 for i in c] for c in self.cliques]}


class CoveringSolution(NamedTuple):
    value: int
    certified: bool
    design: CoveringDesign
    nodes: int = 0

    def to_dict(self):
        return {'value': self.value, 'certified': self.certified, 'nodes': self.nodes, 'design': self.design.to_dict()}


class CliqueCoverSolution(NamedTuple):
    value: int
    certified: bool
    cover: CliqueCover
    nodes: int = 0

    def to_dict(self):
        return {'value': self.value, 'certified': self.certified, 'nodes': self.nodes, 'cover': self.cover.to_dict()}


def _check_nk(n, k):
    if not 2 <= k <= n:
        raise BadArgs(f"need 2 <= k <= n, got n={n}, k={k}")


def schonheim_bound(n, k):
    _check_nk(n, k)
    inner = -(-(n - 1) // (k - 1))
    return -(-(n * inner) // k)


# ==================== SET COVER ENGINE ====================

class _SetCoverSearch:
    """Exact minimum cover of ``universe`` by ``candidates`` (bitmasks).

    Element e is bit e; ``vertex_masks[v]`` holds the elements incident to
    vertex v, and every candidate contains k vertices, so a candidate covers at
    most k - 1 elements at any vertex.
    """

    def __init__(self, universe, candidates, vertex_masks, k, budget):
        self.universe = universe
        self.candidates = candidates
        self.vertex_masks = vertex_masks
        self.k = k
        self.budget = budget
        self.nodes = 0
        self.best = None
        self.root_bound = 0

    def lower_bound(self, uncovered):
        count = uncovered.bit_count()
        if count == 0:
            return 0
        gain = max((c & uncovered).bit_count() for c in self.candidates)
        per_vertex = [-(-(uncovered & m).bit_count() // (self.k - 1)) for m in self.vertex_masks]
        return max(-(-count // gain), max(per_vertex), -(-sum(per_vertex) // self.k))

    def greedy(self):
        chosen, uncovered = [], self.universe
        while uncovered:
            best = max(range(len(self.candidates)), key=lambda i: ((self.candidates[i] & uncovered).bit_count(), -i))
            chosen.append(best)
            uncovered &= ~self.candidates[best]
        return chosen

    def solve(self):
        self.best = self.greedy()
        self.root_bound = self.lower_bound(self.universe)
        if len(self.best) <= self.root_bound:
            return self.best, True
        try:
            self._branch(self.universe, [])
        except _BudgetExhausted:
            logger.warning("set cover: node budget %d exhausted, best %d vs bound %d",
                           self.budget, len(self.best), self.root_bound)
            return self.best, False
        return self.best, True

    def _branch(self, uncovered, chosen):
        self.nodes += 1
        if self.nodes > self.budget:
            raise _BudgetExhausted
        if not uncovered:
            if len(chosen) < len(self.best):
                self.best = list(chosen)
                logger.debug("set cover: incumbent %d after %d nodes", len(chosen), self.nodes)
                if len(self.best) <= self.root_bound:
                    raise _Optimal
            return
        if len(chosen) + self.lower_bound(uncovered) >= len(self.best):
            return
        element = uncovered & -uncovered
        children = [i for i, c in enumerate(self.candidates) if c & element]
        children.sort(key=lambda i: (-(self.candidates[i] & uncovered).bit_count(), i))
        for i in children:
            chosen.append(i)
            try:
                self._branch(uncovered & ~self.candidates[i], chosen)
            finally:
                chosen.pop()

    def run(self):
        try:
            return self.solve()
        except _Optimal:
            return self.best, True


class _BudgetExhausted(Exception):
    pass


class _Optimal(Exception):
    pass


def _cover(n, k, elements, budget):
    """Minimum number of k-subsets of range(n) covering every pair in ``elements``."""
    bit = {e: 1 << i for i, e in enumerate(elements)}
    universe = (1 << len(elements)) - 1
    vertex_masks = [0] * n
    for (i, j), b in bit.items():
        vertex_masks[i] |= b
        vertex_masks[j] |= b

    subsets, masks = [], []
    seen = set()
    for S in itertools.combinations(range(n), k):
        mask = 0
        for pair in itertools.combinations(S, 2):
            mask |= bit.get(pair, 0)
        if mask and mask not in seen:
            seen.add(mask)
            subsets.append(S)
            masks.append(mask)

    # drop subsets whose elements another subset already covers
    order = sorted(range(len(masks)), key=lambda i: (-masks[i].bit_count(), i))
    kept = []
    for i in order:
        if not any(masks[i] | masks[j] == masks[j] for j in kept):
            kept.append(i)
    kept.sort()
    subsets = [subsets[i] for i in kept]
    masks = [masks[i] for i in kept]

    search = _SetCoverSearch(universe, masks, vertex_masks, k, budget)
    chosen, certified = search.run()
    blocks = tuple(sorted(subsets[i] for i in chosen))
    logger.debug("cover n=%d k=%d: %d blocks, certified=%s, %d nodes", n, k, len(blocks), certified, search.nodes)
    return blocks, certified, search.nodes


# ==================== PUBLIC OPERATIONS ====================

def covering_number(n, k, budget=DEFAULT_BUDGET):
    _check_nk(n, k)
    pairs = list(itertools.combinations(range(n), 2))
    blocks, certified, nodes = _cover(n, k, pairs, budget)
    design = CoveringDesign(n=n, k=k, blocks=blocks)
    return CoveringSolution(len(blocks), certified, design, nodes)


def clique_cover_number(G, k, budget=DEFAULT_BUDGET):
    _check_nk(G.n, k)
    edges = G.sorted_edges()
    if not edges:
        return CliqueCoverSolution(0, True, CliqueCover(graph=G, k=k, cliques=()), 0)
    blocks, certified, nodes = _cover(G.n, k, edges, budget)
    cover = CliqueCover(graph=G, k=k, cliques=blocks)
    return CliqueCoverSolution(len(blocks), certified, cover, nodes)


def verify_design(design):
    n, k = design.n, design.k
    covered = set()
    for block in design.blocks:
        if len(block) != k or len(set(block)) != k or not all(0 <= v < n for v in block):
            return False
        covered.update(itertools.combinations(sorted(block), 2))
    return len(covered) == math.comb(n, 2)


def verify_clique_cover(cover):
    n, k = cover.graph.n, cover.k
    for clique in cover.cliques:
        if len(clique) != k or len(set(clique)) != k or not all(0 <= v < n for v in clique):
            return False
    return all(any(i in c and j in c for c in cover.cliques) for i, j in cover.graph.edges)


def design_matrix(design):
    """Sum of 1_S 1_S^T over the blocks: width k, every entry nonzero."""
    M = np.zeros((design.n, design.n))
    for block in design.blocks:
        idx = np.asarray(block)
        M[np.ix_(idx, idx)] += 1.0
    return SymMatrix(M)
