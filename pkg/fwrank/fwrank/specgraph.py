"""
Support graphs of symmetric matrices and the graph machinery the width bounds
need: chordality via maximum cardinality search, clique numbers of chordal
graphs and bandwidth-minimizing relabellings.

Vertices are 0-based internally. The text format and JSON output are 1-based.
"""
import itertools
import logging
import math
from dataclasses import dataclass
from typing import NamedTuple

import networkx as nx
import numpy as np

from .exceptions import NotChordal, ParseError, TooLarge

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SupportGraph:
    n: int
    edges: frozenset

    def __post_init__(self):
        for i, j in self.edges:
            if not (0 <= i < j < self.n):
                raise ParseError(f"invalid edge ({i + 1}, {j + 1}) for a graph on {self.n} vertices")

    @classmethod
    def from_edges(cls, n, edges, one_based=False):
        shift = 1 if one_based else 0
        normalized = set()
        for i, j in edges:
            i, j = int(i) - shift, int(j) - shift
            if i == j:
                raise ParseError(f"self-loop at vertex {i + 1}")
            normalized.add((min(i, j), max(i, j)))
        return cls(n=n, edges=frozenset(normalized))

    def sorted_edges(self):
        return sorted(self.edges)

    def adjacency(self):
        adj = [set() for _ in range(self.n)]
        for i, j in self.edges:
            adj[i].add(j)
            adj[j].add(i)
        return adj

    def to_networkx(self):
        G = nx.Graph()
        G.add_nodes_from(range(self.n))
        G.add_edges_from(self.edges)
        return G

    def relabeled(self, perm):
        """Graph of P A P^T: vertex ``perm[i]`` becomes vertex ``i``."""
        position = {v: i for i, v in enumerate(perm)}
        return SupportGraph.from_edges(self.n, [(position[i], position[j]) for i, j in self.edges])

    def components(self):
        return [sorted(c) for c in sorted(nx.connected_components(self.to_networkx()), key=min)]

    def to_dict(self):
        return {'n': self.n, 'edges': [[i + 1, j + 1] for i, j in self.sorted_edges()]}


@dataclass(frozen=True)
class EliminationOrdering:
    order: tuple
    perfect: bool

    def to_dict(self):
        return {'order': [v + 1 for v in self.order], 'perfect': self.perfect}


class BandwidthPermutation(NamedTuple):
    perm: tuple
    band: int
    optimal: bool = True


def support_graph(A):
    rows, cols = np.nonzero(np.triu(A.nonzero_mask(), 1))
    return SupportGraph(n=A.n, edges=frozenset(zip(rows.tolist(), cols.tolist())))


def is_chordal(G):
    """Maximum cardinality search, ties broken by the smallest vertex index.

    The elimination ordering is the reverse of the visiting order. It is
    perfect iff, for every vertex, its later neighbours other than the earliest
    one are all adjacent to that earliest one.
    """
    adj = G.adjacency()
    weight = [0] * G.n
    unnumbered = list(range(G.n))
    visit = []
    while unnumbered:
        z = max(unnumbered, key=lambda v: weight[v])
        unnumbered.remove(z)
        visit.append(z)
        for y in adj[z]:
            if y in unnumbered:
                weight[y] += 1

    order = tuple(reversed(visit))
    position = {v: i for i, v in enumerate(order)}
    perfect = True
    for v in order:
        later = [u for u in adj[v] if position[u] > position[v]]
        if len(later) < 2:
            continue
        first = min(later, key=position.__getitem__)
        if any(u != first and u not in adj[first] for u in later):
            perfect = False
            break
    return EliminationOrdering(order=order, perfect=perfect)


def clique_number_chordal(G, peo):
    if not peo.perfect:
        raise NotChordal("clique number via elimination ordering requires a chordal graph")
    adj = G.adjacency()
    position = {v: i for i, v in enumerate(peo.order)}
    later_counts = [sum(1 for u in adj[v] if position[u] > position[v]) for v in range(G.n)]
    return 1 + max(later_counts, default=0)


def _band_of(edges, perm):
    if not edges:
        return 1
    position = {v: i for i, v in enumerate(perm)}
    return 1 + max(abs(position[i] - position[j]) for i, j in edges)


def min_bandwidth_permutation(A, n_limit=8, fallback=False):
    """Exhaustive search over relabellings for the smallest bandwidth.

    Permutations are enumerated lexicographically and only strict improvements
    replace the incumbent, so the lexicographically smallest optimum wins. The
    result ``perm`` means row ``i`` of P A P^T is row ``perm[i]`` of A.
    """
    G = support_graph(A)
    if A.n > n_limit:
        if not fallback:
            raise TooLarge(f"exhaustive bandwidth search limited to n <= {n_limit}, got n = {A.n}")
        order = tuple(nx.utils.reverse_cuthill_mckee_ordering(G.to_networkx()))
        band = _band_of(G.edges, order)
        logger.warning("min_bandwidth_permutation: n=%d above limit, reverse Cuthill-McKee band %d", A.n, band)
        return BandwidthPermutation(perm=order, band=band, optimal=False)

    edges = G.sorted_edges()
    max_degree = max((len(nbrs) for nbrs in G.adjacency()), default=0)
    floor = 1 + math.ceil(max_degree / 2)

    best_perm, best_band = None, None
    for perm in itertools.permutations(range(A.n)):
        band = _band_of(edges, perm)
        if best_band is None or band < best_band:
            best_perm, best_band = perm, band
            if best_band <= floor:
                break
    logger.debug("min_bandwidth_permutation: n=%d band=%d perm=%s", A.n, best_band, best_perm)
    return BandwidthPermutation(perm=tuple(best_perm), band=best_band)


def read_graph_text(text):
    """Parse ``n m`` followed by ``m`` lines of 1-based ``i j``."""
    lines = [line.split() for line in text.splitlines() if line.strip() and not line.lstrip().startswith('#')]
    if not lines:
        raise ParseError("empty graph input")
    try:
        n, m = (int(t) for t in lines[0])
        pairs = [(int(i), int(j)) for i, j in lines[1:]]
    except ValueError as exc:
        raise ParseError(f"malformed graph text: {exc}") from exc
    if n < 1:
        raise ParseError("graph must have at least one vertex")
    if len(pairs) != m:
        raise ParseError(f"header announces {m} edges, found {len(pairs)}")
    for i, j in pairs:
        if not (1 <= i <= n and 1 <= j <= n):
            raise ParseError(f"edge ({i}, {j}) out of range 1..{n}")
    G = SupportGraph.from_edges(n, pairs, one_based=True)
    if len(G.edges) != m:
        raise ParseError("duplicate edges in graph input")
    return G


def write_graph_text(G):
    edges = G.sorted_edges()
    lines = [f"{G.n} {len(edges)}"]
    lines.extend(f"{i + 1} {j + 1}" for i, j in edges)
    return "\n".join(lines) + "\n"
