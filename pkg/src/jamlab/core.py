"""Parameter bundle, graph container and the package's exception types."""
from __future__ import annotations

from dataclasses import dataclass, field

import numba
import numpy as np


class JamlabError(Exception):
    """Base class for every error raised by jamlab."""


class DomainError(JamlabError, ValueError):
    """An argument lies outside the domain of the operation."""


class SizeError(DomainError):
    """The instance is too large for an exact (enumerative) routine."""


class UndefinedValueError(DomainError):
    """The requested statistic is undefined on this input (e.g. no wedges)."""


class PreconditionError(JamlabError, ValueError):
    """A state-machine step was requested from a state that does not allow it."""


class NumericalError(JamlabError, ArithmeticError):
    """A numerical routine failed to reach its tolerance."""


@dataclass(frozen=True)
class Params:
    """Model parameters ``(n, c, alpha, d)`` and the household constants.

    ``mu`` is the mean household size ``1 + alpha*c``, ``sigma2`` its variance
    ``alpha*c`` and ``lam`` the rate of distant (cross-household) edges
    ``(1 - alpha)*c``.
    """

    n: int
    c: float
    alpha: float
    d: int = 2
    mu: float = field(init=False)
    lam: float = field(init=False)
    sigma2: float = field(init=False)

    def __post_init__(self):
        n, d = self.n, self.d
        if isinstance(n, bool) or int(n) != n or n < 1:
            raise DomainError(f"n must be a positive integer, got {n!r}")
        if isinstance(d, bool) or int(d) != d or d < 1:
            raise DomainError(f"d must be a positive integer, got {d!r}")
        c = float(self.c)
        alpha = float(self.alpha)
        if not np.isfinite(c) or c < 0:
            raise DomainError(f"c must be finite and non-negative, got {self.c!r}")
        if not 0.0 <= alpha <= 1.0:
            raise DomainError(f"alpha must lie in [0, 1], got {self.alpha!r}")
        sigma2 = alpha * c
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "d", int(d))
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "sigma2", sigma2)
        object.__setattr__(self, "mu", 1.0 + sigma2)
        # c - sigma2 rather than (1 - alpha)*c keeps lam + sigma2 == c exact
        object.__setattr__(self, "lam", c - sigma2)


def params_new(n: int, c: float, alpha: float, d: int = 2) -> Params:
    return Params(n, c, alpha, d)


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable simple undirected graph in compressed sparse row form.

    The neighbours of ``v`` are ``indices[indptr[v]:indptr[v + 1]]``, sorted
    ascending. ``positions`` is an ``(n, d)`` array for geometric graphs and
    ``None`` otherwise.
    """

    n: int
    indptr: np.ndarray
    indices: np.ndarray
    positions: np.ndarray | None = None

    def __post_init__(self):
        indptr = np.ascontiguousarray(self.indptr, dtype=np.int64)
        indices = np.ascontiguousarray(self.indices, dtype=np.int64)
        if indptr.shape != (self.n + 1,) or indptr[0] != 0 or indptr[-1] != indices.size:
            raise DomainError("malformed CSR arrays")
        indptr.flags.writeable = False
        indices.flags.writeable = False
        object.__setattr__(self, "indptr", indptr)
        object.__setattr__(self, "indices", indices)
        if self.positions is not None:
            pos = np.ascontiguousarray(self.positions, dtype=np.float64)
            if pos.ndim != 2 or pos.shape[0] != self.n:
                raise DomainError("positions must have shape (n, d)")
            pos.flags.writeable = False
            object.__setattr__(self, "positions", pos)

    @classmethod
    def from_edges(cls, n: int, edges, positions=None) -> "Graph":
        """Build from an iterable of ``(u, v)`` pairs; rejects loops and duplicates."""
        arr = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges,
                         dtype=np.int64).reshape(-1, 2)
        if arr.size and (arr.min() < 0 or arr.max() >= n):
            raise DomainError("edge endpoint out of range")
        if np.any(arr[:, 0] == arr[:, 1]):
            raise DomainError("self-loops are not allowed")
        lo = np.minimum(arr[:, 0], arr[:, 1])
        hi = np.maximum(arr[:, 0], arr[:, 1])
        if np.unique(lo * n + hi).size != lo.size:
            raise DomainError("duplicate edges are not allowed")
        indptr, indices = csr_from_edges(n, lo, hi)
        return cls(n, indptr, indices, positions)

    @classmethod
    def empty(cls, n: int, positions=None) -> "Graph":
        return cls(n, np.zeros(n + 1, dtype=np.int64), np.zeros(0, dtype=np.int64), positions)

    @classmethod
    def complete(cls, n: int) -> "Graph":
        iu, ju = np.triu_indices(n, k=1)
        return cls.from_edges(n, np.column_stack([iu, ju]))

    @property
    def num_edges(self) -> int:
        return self.indices.size // 2

    @property
    def dim(self) -> int | None:
        return None if self.positions is None else self.positions.shape[1]

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def has_edge(self, u: int, v: int) -> bool:
        nb = self.neighbors(u)
        k = np.searchsorted(nb, v)
        return bool(k < nb.size and nb[k] == v)

    def edges(self) -> np.ndarray:
        """All edges as an ``(m, 2)`` array with ``u < v``, lexicographically sorted."""
        src = np.repeat(np.arange(self.n, dtype=np.int64), self.degrees())
        mask = src < self.indices
        return np.column_stack([src[mask], self.indices[mask]])

    def check(self) -> None:
        """Full scan of symmetry and simplicity; raises DomainError on violation."""
        if not _is_simple_symmetric(self.n, self.indptr, self.indices):
            raise DomainError("graph is not simple and symmetric with sorted rows")


@numba.njit(cache=True)
def _is_simple_symmetric(n, indptr, indices):
    for u in range(n):
        prev = -1
        for k in range(indptr[u], indptr[u + 1]):
            v = indices[k]
            if v < 0 or v >= n or v == u or v <= prev:
                return False
            prev = v
            # binary search for u in row v
            lo, hi = indptr[v], indptr[v + 1]
            while lo < hi:
                mid = (lo + hi) // 2
                if indices[mid] < u:
                    lo = mid + 1
                else:
                    hi = mid
            if lo == indptr[v + 1] or indices[lo] != u:
                return False
    return True


@numba.njit(cache=True)
def csr_from_edges(n, src, dst):
    """CSR arrays of the symmetric closure of the edge list ``(src[i], dst[i])``."""
    m = src.size
    deg = np.zeros(n + 1, dtype=np.int64)
    for i in range(m):
        deg[src[i] + 1] += 1
        deg[dst[i] + 1] += 1
    for v in range(n):
        deg[v + 1] += deg[v]
    indptr = deg.copy()
    fill = deg[:n].copy()
    indices = np.empty(2 * m, dtype=np.int64)
    for i in range(m):
        u = src[i]
        v = dst[i]
        indices[fill[u]] = v
        fill[u] += 1
        indices[fill[v]] = u
        fill[v] += 1
    for v in range(n):
        a, b = indptr[v], indptr[v + 1]
        if b - a > 32:
            indices[a:b].sort()
            continue
        # insertion sort: rows are short at bounded mean degree
        for i in range(a + 1, b):
            x = indices[i]
            j = i - 1
            while j >= a and indices[j] > x:
                indices[j + 1] = indices[j]
                j -= 1
            indices[j + 1] = x
    return indptr, indices
