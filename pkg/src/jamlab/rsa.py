"""Random sequential adsorption on a graph (random greedy maximal independent set)."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numba
import numpy as np

from .core import Graph, SizeError
from .rng import RngStream, permutation

EXACT_MAX_N = 10


@dataclass(frozen=True, eq=False)
class JamResult:
    active: np.ndarray  # sorted vertex ids
    jam_count: int
    n: int

    @property
    def jam_fraction(self) -> float:
        return self.jam_count / self.n


@numba.njit(cache=True)
def greedy_count(st, n, indptr, indices, active):
    """Visit a uniform random permutation; activate each vertex with no active neighbour."""
    order = permutation(st, n)
    blocked = np.zeros(n, dtype=np.bool_)
    count = 0
    for v in order:
        if blocked[v]:
            continue
        active[v] = True
        count += 1
        blocked[v] = True
        for k in range(indptr[v], indptr[v + 1]):
            blocked[indices[k]] = True
    return count


def greedy_jam(graph: Graph, rng: RngStream) -> JamResult:
    active = np.zeros(graph.n, dtype=np.bool_)
    count = greedy_count(rng.state, graph.n, graph.indptr, graph.indices, active)
    return JamResult(np.flatnonzero(active), int(count), graph.n)


def is_independent(graph: Graph, vertices) -> bool:
    mask = np.zeros(graph.n, dtype=np.bool_)
    mask[np.asarray(vertices, dtype=np.int64)] = True
    src = np.repeat(np.arange(graph.n), graph.degrees())
    return not np.any(mask[src] & mask[graph.indices])


def is_maximal_independent(graph: Graph, vertices) -> bool:
    """Independent, and every vertex outside the set has a neighbour inside it."""
    if not is_independent(graph, vertices):
        return False
    mask = np.zeros(graph.n, dtype=np.bool_)
    mask[np.asarray(vertices, dtype=np.int64)] = True
    src = np.repeat(np.arange(graph.n), graph.degrees())
    dominated = mask.copy()
    dominated[src[mask[graph.indices]]] = True
    return bool(dominated.all())


def exact_expected_jam(graph: Graph) -> float:
    """Exact mean jam count, by recursion over the set of still-unblocked vertices.

    ``E(S) = 1 + mean over v in S of E(S minus the closed neighbourhood of v)``.
    """
    n = graph.n
    if n > EXACT_MAX_N:
        raise SizeError(f"exact expectation is limited to n <= {EXACT_MAX_N}, got {n}")
    closed = [(1 << v) | sum(1 << int(u) for u in graph.neighbors(v)) for v in range(n)]

    @lru_cache(maxsize=None)
    def expect(free: int) -> float:
        if free == 0:
            return 0.0
        total = 0.0
        k = 0
        rest = free
        while rest:
            low = rest & -rest
            v = low.bit_length() - 1
            total += expect(free & ~closed[v])
            k += 1
            rest ^= low
        return 1.0 + total / k

    return expect((1 << n) - 1)
