"""Random geometric graphs on the periodic unit cube."""
from __future__ import annotations

import math

import numba
import numpy as np

from .core import DomainError, Graph, Params, csr_from_edges
from .rng import RngStream, next_double

# cell lists need at least three cells per axis, otherwise the 3^d block
# around a cell wraps onto itself
_MIN_CELLS = 3


def ball_volume(d: int, radius: float) -> float:
    return math.pi ** (d / 2) * radius ** d / math.gamma(1 + d / 2)


def radius_for(n: int, c: float, d: int) -> float:
    """Sphere radius ``r`` such that ``n * V_d(2r) = c`` (mean degree ``c``)."""
    if n < 1 or d < 1:
        raise DomainError("radius_for needs n >= 1 and d >= 1")
    if not c > 0:
        raise DomainError(f"density c must be positive, got {c!r}")
    return 0.5 * (c * math.gamma(1 + d / 2) / (n * math.pi ** (d / 2))) ** (1.0 / d)


def torus_distance(p, q) -> float:
    """Euclidean distance on the unit torus, coordinate-wise wrapped."""
    p = np.atleast_1d(np.asarray(p, dtype=np.float64))
    q = np.atleast_1d(np.asarray(q, dtype=np.float64))
    if p.shape != q.shape:
        raise DomainError("points must have the same dimension")
    return float(_torus_dist(p, q))


@numba.njit(cache=True, inline="always")
def _torus_dist(p, q):
    s = 0.0
    for k in range(p.size):
        delta = abs(p[k] - q[k])
        delta = min(delta, 1.0 - delta)
        s += delta * delta
    return math.sqrt(s)


@numba.njit(cache=True)
def sample_positions(st, n, d):
    pos = np.empty((n, d), dtype=np.float64)
    for i in range(n):
        for k in range(d):
            pos[i, k] = next_double(st)
    return pos


@numba.njit(cache=True)
def _grow(arr, m):
    """Copy of ``arr[:m]`` in a buffer of twice the size."""
    out = np.empty(2 * arr.size, dtype=arr.dtype)
    out[:m] = arr[:m]
    return out


@numba.njit(cache=True)
def brute_force_edges(pos, thr):
    n = pos.shape[0]
    src = np.empty(max(16, n), dtype=np.int64)
    dst = np.empty(max(16, n), dtype=np.int64)
    m = 0
    for i in range(n):
        for j in range(i + 1, n):
            if _torus_dist(pos[i], pos[j]) <= thr:
                if m == src.size:
                    src = _grow(src, m)
                    dst = _grow(dst, m)
                src[m] = i
                dst[m] = j
                m += 1
    return src[:m], dst[:m]


@numba.njit(cache=True)
def cells_per_axis(n, d, thr):
    if thr <= 0.0:
        return 0
    m = int(math.floor(1.0 / thr))
    # keep the table at O(n) cells
    cap = int(math.floor((4.0 * n + 64.0) ** (1.0 / d)))
    if m > cap:
        m = cap
    return m


@numba.njit(cache=True)
def cell_list_edges(pos, thr, m):
    """All pairs within torus distance ``thr`` using ``m`` cells per axis (``m >= 3``)."""
    n, d = pos.shape
    ncells = m ** d
    cell = np.empty(n, dtype=np.int64)
    for i in range(n):
        idx = 0
        stride = 1
        for k in range(d):
            ck = int(pos[i, k] * m)
            if ck >= m:
                ck = m - 1
            idx += ck * stride
            stride *= m
        cell[i] = idx
    start = np.zeros(ncells + 1, dtype=np.int64)
    for i in range(n):
        start[cell[i] + 1] += 1
    for q in range(ncells):
        start[q + 1] += start[q]
    order = np.empty(n, dtype=np.int64)
    fill = start[:ncells].copy()
    for i in range(n):
        order[fill[cell[i]]] = i
        fill[cell[i]] += 1

    noff = 3 ** d
    coords = np.empty(d, dtype=np.int64)
    cap = max(16, 8 * n)
    src = np.empty(cap, dtype=np.int64)
    dst = np.empty(cap, dtype=np.int64)
    mcount = 0
    for i in range(n):
        rem = cell[i]
        for k in range(d):
            coords[k] = rem % m
            rem //= m
        for o in range(noff):
            code = o
            q = 0
            stride = 1
            for k in range(d):
                step = code % 3 - 1
                code //= 3
                ck = coords[k] + step
                if ck < 0:
                    ck += m
                elif ck >= m:
                    ck -= m
                q += ck * stride
                stride *= m
            for s in range(start[q], start[q + 1]):
                j = order[s]
                if j > i and _torus_dist(pos[i], pos[j]) <= thr:
                    if mcount == src.size:
                        src = _grow(src, mcount)
                        dst = _grow(dst, mcount)
                    src[mcount] = i
                    dst[mcount] = j
                    mcount += 1
    return src[:mcount], dst[:mcount]


@numba.njit(cache=True)
def geometric_edges(pos, thr):
    n, d = pos.shape
    if thr <= 0.0 or n < 2:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    m = cells_per_axis(n, d, thr)
    if m < _MIN_CELLS:
        return brute_force_edges(pos, thr)
    return cell_list_edges(pos, thr, m)


@numba.njit(cache=True)
def rgg_csr(st, n, d, thr):
    pos = sample_positions(st, n, d)
    src, dst = geometric_edges(pos, thr)
    indptr, indices = csr_from_edges(n, src, dst)
    return pos, indptr, indices


def connection_threshold(params: Params) -> float:
    """Edge threshold ``2 r(n)``; zero for ``c = 0``."""
    if params.c == 0:
        return 0.0
    return 2.0 * radius_for(params.n, params.c, params.d)


def sample_rgg(params: Params, rng: RngStream) -> Graph:
    """Random geometric graph RGG(c, d): uniform points, edges at torus distance <= 2r."""
    thr = connection_threshold(params)
    pos, indptr, indices = rgg_csr(rng.state, params.n, params.d, thr)
    return Graph(params.n, indptr, indices, pos)


def geometric_graph(positions, threshold: float, method: str = "auto") -> Graph:
    """Graph on given torus points with edges at distance <= ``threshold``.

    ``method`` is ``"auto"``, ``"cells"`` or ``"brute"``.
    """
    pos = np.ascontiguousarray(positions, dtype=np.float64)
    if pos.ndim == 1:
        pos = pos[:, None]
    if pos.size and (pos.min() < 0.0 or pos.max() >= 1.0):
        raise DomainError("positions must lie in [0, 1)")
    n, d = pos.shape
    if method == "brute":
        src, dst = brute_force_edges(pos, float(threshold))
    elif method == "cells":
        m = cells_per_axis(n, d, float(threshold))
        if m < _MIN_CELLS:
            raise DomainError("threshold too large for a cell list; use brute force")
        src, dst = cell_list_edges(pos, float(threshold), m)
    elif method == "auto":
        src, dst = geometric_edges(pos, float(threshold))
    else:
        raise DomainError(f"unknown method {method!r}")
    indptr, indices = csr_from_edges(n, src, dst)
    return Graph(n, indptr, indices, pos)
