"""Graph-free simulation of RSA on CRG(c, alpha).

The clustered graph is revealed only around vertices as they activate. The
chain tracks ``X`` = number of unexplored vertices (neither active nor
blocked) and ``Y`` = number of vertices not yet placed in any household
(unexplored plus those blocked only by a distant edge). One step:

1. activate a uniform unexplored vertex ``v``;
2. its household partners: ``H = min(Poisson(alpha c), Y - 1)`` vertices
   drawn without replacement from the ``Y - 1`` unplaced vertices other than
   ``v``; ``eta1`` of them were unexplored (hypergeometric with ``X - 1``
   favourable);
3. distant neighbours among the remaining ``X - 1 - eta1`` unexplored
   vertices: ``eta2 ~ Binomial(X - 1 - eta1, (1 - alpha) c / n)``;
4. ``X -= 1 + eta1 + eta2``, ``Y -= 1 + H``.

The number of steps until ``X = 0`` is the jam count.
"""
from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

from . import rng as _rng
from .core import DomainError, Params, PreconditionError
from .rsa import JamResult
from .rng import RngStream


@dataclass(frozen=True)
class ExplorationState:
    t: int
    X: int
    Y: int

    @classmethod
    def initial(cls, n: int) -> "ExplorationState":
        return cls(0, n, n)

    def partition_sizes(self, n: int) -> tuple[int, int, int, int]:
        """Sizes of (active, unexplored, household-blocked, distant-blocked)."""
        return self.t, self.X, n - self.t - self.Y, self.Y - self.X


@numba.njit(cache=True)
def step(st, X, Y, mean_extra, p):
    h = _rng.poisson(st, mean_extra)
    if h > Y - 1:
        h = Y - 1
    eta1 = _rng.hypergeometric(st, X - 1, Y - 1, h)
    eta2 = _rng.binomial(st, X - 1 - eta1, p)
    return X - 1 - eta1 - eta2, Y - 1 - h


@numba.njit(cache=True)
def jam_count(st, n, mean_extra, p):
    X = n
    Y = n
    t = 0
    while X > 0:
        X, Y = step(st, X, Y, mean_extra, p)
        t += 1
    return t


@numba.njit(cache=True)
def trace(st, n, mean_extra, p):
    ts = np.empty(n + 1, dtype=np.int64)
    xs = np.empty(n + 1, dtype=np.int64)
    ys = np.empty(n + 1, dtype=np.int64)
    X = n
    Y = n
    t = 0
    ts[0] = 0
    xs[0] = X
    ys[0] = Y
    while X > 0:
        X, Y = step(st, X, Y, mean_extra, p)
        t += 1
        ts[t] = t
        xs[t] = X
        ys[t] = Y
    return ts[:t + 1], xs[:t + 1], ys[:t + 1]


def _edge_probability(params: Params) -> float:
    p = params.lam / params.n
    if p > 1.0:
        raise DomainError("(1 - alpha) c / n exceeds 1")
    return p


def hypergeometric(good: int, population: int, draws: int, rng: RngStream) -> int:
    return rng.hypergeometric(good, population, draws)


def explore_step(state: ExplorationState, params: Params, rng: RngStream) -> ExplorationState:
    if state.X < 1:
        raise PreconditionError("no unexplored vertex left to activate")
    X, Y = step(rng.state, state.X, state.Y, params.sigma2, _edge_probability(params))
    return ExplorationState(state.t + 1, int(X), int(Y))


def explore_jam(params: Params, rng: RngStream) -> JamResult:
    """Jam count of RSA on CRG(c, alpha), simulated without building the graph.

    Vertex identities are not tracked, so ``active`` is empty.
    """
    t = jam_count(rng.state, params.n, params.sigma2, _edge_probability(params))
    return JamResult(np.zeros(0, dtype=np.int64), int(t), params.n)


def explore_trace(params: Params, rng: RngStream) -> np.ndarray:
    """Full trajectory as an ``(steps + 1, 3)`` array of ``(t, X, Y)``."""
    ts, xs, ys = trace(rng.state, params.n, params.sigma2, _edge_probability(params))
    return np.column_stack([ts, xs, ys])
