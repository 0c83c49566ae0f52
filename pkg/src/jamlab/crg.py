"""Clustered random graphs CRG(c, alpha).

Vertices are partitioned into households whose sizes are drawn as
``1 + Poisson(alpha c)``; each household is a clique, and every pair of
vertices from different households is joined independently with probability
``(1 - alpha) c / n``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np

from .core import DomainError, Graph, Params, csr_from_edges
from .rgg import _grow
from .rng import RngStream, geometric_skip, poisson, randint


@dataclass(frozen=True, eq=False)
class HouseholdPartition:
    assignment: np.ndarray  # vertex -> household id, ids in creation order
    sizes: np.ndarray       # household id -> size

    @property
    def count(self) -> int:
        return self.sizes.size


@numba.njit(cache=True)
def households(st, n, mean_extra):
    """Sequential household formation.

    Draw ``s = 1 + Poisson(mean_extra)``; while ``s`` fits in the remaining
    vertices, pick ``s`` of them uniformly as the next household. The first
    draw that does not fit makes all remaining vertices one household.
    """
    pool = np.arange(n)
    assignment = np.empty(n, dtype=np.int64)
    sizes = np.empty(n, dtype=np.int64)
    rem = n
    h = 0
    while rem > 0:
        s = 1 + poisson(st, mean_extra)
        if s >= rem:
            for k in range(rem):
                assignment[pool[k]] = h
            sizes[h] = rem
            h += 1
            break
        for _ in range(s):
            j = randint(st, rem)
            v = pool[j]
            pool[j] = pool[rem - 1]
            pool[rem - 1] = v
            rem -= 1
            assignment[v] = h
        sizes[h] = s
        h += 1
    return assignment, sizes[:h].copy()


@numba.njit(cache=True)
def crg_edges(st, n, assignment, sizes, p):
    cap = 16 + n * 4
    src = np.empty(cap, dtype=np.int64)
    dst = np.empty(cap, dtype=np.int64)
    m = 0
    # cross-household edges: geometric skipping over pairs (w < v), in the
    # order (1,0), (2,0), (2,1), (3,0), ...
    if p >= 1.0:
        for v in range(1, n):
            for w in range(v):
                if assignment[v] != assignment[w]:
                    if m == src.size:
                        src = _grow(src, m)
                        dst = _grow(dst, m)
                    src[m] = w
                    dst[m] = v
                    m += 1
    elif p > 0.0:
        lp = math.log1p(-p)
        v = 1
        w = -1
        while v < n:
            w += 1 + geometric_skip(st, lp)
            while w >= v and v < n:
                w -= v
                v += 1
            if v < n and assignment[v] != assignment[w]:
                if m == src.size:
                    src = _grow(src, m)
                    dst = _grow(dst, m)
                src[m] = w
                dst[m] = v
                m += 1
    # household cliques
    members = np.empty(n, dtype=np.int64)
    start = np.zeros(sizes.size + 1, dtype=np.int64)
    for h in range(sizes.size):
        start[h + 1] = start[h] + sizes[h]
    fill = start[:sizes.size].copy()
    for v in range(n):
        h = assignment[v]
        members[fill[h]] = v
        fill[h] += 1
    for h in range(sizes.size):
        for a in range(start[h], start[h + 1]):
            for b in range(a + 1, start[h + 1]):
                if m == src.size:
                    src = _grow(src, m)
                    dst = _grow(dst, m)
                src[m] = members[a]
                dst[m] = members[b]
                m += 1
    return src[:m], dst[:m]


@numba.njit(cache=True)
def crg_csr(st, n, mean_extra, p):
    assignment, sizes = households(st, n, mean_extra)
    src, dst = crg_edges(st, n, assignment, sizes, p)
    indptr, indices = csr_from_edges(n, src, dst)
    return assignment, sizes, indptr, indices


def edge_probability(params: Params) -> float:
    p = params.lam / params.n
    if p > 1.0:
        raise DomainError(
            f"(1 - alpha) c / n = {p:.6g} exceeds 1; n is too small for density c")
    return p


def sample_households(params: Params, rng: RngStream) -> HouseholdPartition:
    assignment, sizes = households(rng.state, params.n, params.sigma2)
    return HouseholdPartition(assignment, sizes)


def sample_crg_with_households(params: Params, rng: RngStream) -> tuple[Graph, HouseholdPartition]:
    p = edge_probability(params)
    assignment, sizes, indptr, indices = crg_csr(rng.state, params.n, params.sigma2, p)
    return Graph(params.n, indptr, indices), HouseholdPartition(assignment, sizes)


def sample_crg(params: Params, rng: RngStream) -> Graph:
    """One draw of CRG(c, alpha) on ``params.n`` vertices."""
    return sample_crg_with_households(params, rng)[0]
