"""Monte Carlo harness: seeded replications, summaries and CLT diagnostics.

Replication ``i`` always draws from stream ``(master_seed, i)``; results are
stored by index and folded in index order, so a summary does not depend on
the number of worker threads.
"""
from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numba
import numpy as np
from scipy import stats

from . import crg as _crg
from . import explore as _explore
from . import rgg as _rgg
from . import rsa as _rsa
from .core import DomainError, Params
from .rng import new_state

MODELS = ("rgg", "crg", "explore")

# replications are folded in blocks of this size and the blocks merged left to right
_FOLD_BLOCK = 256


@dataclass(frozen=True)
class ModelSpec:
    """Which pipeline to replicate: ``rgg`` and ``crg`` build a graph and run
    greedy RSA on it; ``explore`` runs the graph-free CRG chain."""

    model: str
    params: Params

    def __post_init__(self):
        if self.model not in MODELS:
            raise DomainError(f"model must be one of {MODELS}, got {self.model!r}")
        if self.model in ("crg", "explore"):
            _crg.edge_probability(self.params)


@numba.njit(cache=True, nogil=True)
def _batch_rgg(seed, start, stop, n, d, thr, out):
    active = np.zeros(n, dtype=np.bool_)
    for i in range(start, stop):
        st = new_state(seed, np.uint64(i))
        _, indptr, indices = _rgg.rgg_csr(st, n, d, thr)
        active[:] = False
        out[i] = _rsa.greedy_count(st, n, indptr, indices, active)


@numba.njit(cache=True, nogil=True)
def _batch_crg(seed, start, stop, n, mean_extra, p, out):
    active = np.zeros(n, dtype=np.bool_)
    for i in range(start, stop):
        st = new_state(seed, np.uint64(i))
        _, _, indptr, indices = _crg.crg_csr(st, n, mean_extra, p)
        active[:] = False
        out[i] = _rsa.greedy_count(st, n, indptr, indices, active)


@numba.njit(cache=True, nogil=True)
def _batch_explore(seed, start, stop, n, mean_extra, p, out):
    for i in range(start, stop):
        st = new_state(seed, np.uint64(i))
        out[i] = _explore.jam_count(st, n, mean_extra, p)


@numba.njit(cache=True, nogil=True)
def _batch_greedy(seed, start, stop, n, indptr, indices, out):
    active = np.zeros(n, dtype=np.bool_)
    for i in range(start, stop):
        st = new_state(seed, np.uint64(i))
        out[i] = _rsa.greedy_count(st, n, indptr, indices, active)


def _run_chunks(kernel, args, reps: int, parallelism: int) -> np.ndarray:
    out = np.zeros(reps, dtype=np.int64)
    parallelism = max(1, int(parallelism))
    if parallelism == 1 or reps < 2:
        kernel(*args[:1], 0, reps, *args[1:], out)
        return out
    nchunks = min(reps, 4 * parallelism)
    bounds = np.linspace(0, reps, nchunks + 1).astype(np.int64)
    with ThreadPoolExecutor(max_workers=parallelism) as pool:
        futures = [pool.submit(kernel, *args[:1], int(a), int(b), *args[1:], out)
                   for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
        for f in futures:
            f.result()
    return out


def _seed(master_seed: int) -> np.uint64:
    s = int(master_seed)
    if s < 0 or s >= 1 << 64:
        raise DomainError("master_seed must lie in [0, 2**64)")
    return np.uint64(s)


def jam_counts(spec: ModelSpec, reps: int, master_seed: int, parallelism: int = 1) -> np.ndarray:
    """Jam counts of replications ``0..reps-1``, in replication order."""
    if reps < 1:
        raise DomainError("reps must be >= 1")
    p = spec.params
    seed = _seed(master_seed)
    if spec.model == "rgg":
        thr = _rgg.connection_threshold(p)
        return _run_chunks(_batch_rgg, (seed, p.n, p.d, thr), reps, parallelism)
    if spec.model == "crg":
        q = _crg.edge_probability(p)
        return _run_chunks(_batch_crg, (seed, p.n, p.sigma2, q), reps, parallelism)
    q = _crg.edge_probability(p)
    return _run_chunks(_batch_explore, (seed, p.n, p.sigma2, q), reps, parallelism)


def greedy_counts(graph, reps: int, master_seed: int, parallelism: int = 1) -> np.ndarray:
    """Greedy RSA jam counts on one fixed graph, replication ``i`` on stream ``(seed, i)``."""
    if reps < 1:
        raise DomainError("reps must be >= 1")
    return _run_chunks(_batch_greedy, (_seed(master_seed), graph.n, graph.indptr, graph.indices),
                       reps, parallelism)


class Welford:
    """Running mean and sum of squared deviations; ``merge`` combines two runs."""

    __slots__ = ("count", "mean", "m2")

    def __init__(self, count=0, mean=0.0, m2=0.0):
        self.count = count
        self.mean = mean
        self.m2 = m2

    def add(self, x: float) -> None:
        self.count += 1
        delta = x - self.mean
        self.mean += delta / self.count
        self.m2 += delta * (x - self.mean)

    def merge(self, other: "Welford") -> "Welford":
        if other.count == 0:
            return Welford(self.count, self.mean, self.m2)
        if self.count == 0:
            return Welford(other.count, other.mean, other.m2)
        count = self.count + other.count
        delta = other.mean - self.mean
        mean = self.mean + delta * other.count / count
        m2 = self.m2 + other.m2 + delta * delta * self.count * other.count / count
        return Welford(count, mean, m2)

    @property
    def var(self) -> float:
        return self.m2 / (self.count - 1) if self.count > 1 else 0.0


def fold(values) -> Welford:
    total = Welford()
    for a in range(0, len(values), _FOLD_BLOCK):
        block = Welford()
        for x in values[a:a + _FOLD_BLOCK]:
            block.add(float(x))
        total = total.merge(block)
    return total


@dataclass(frozen=True, eq=False)
class McSummary:
    """Replication statistics of the jam fraction."""

    n: int
    reps: int
    mean: float
    var: float
    scaled_var: float
    stderr: float
    bins: np.ndarray
    counts: np.ndarray
    jam_counts: np.ndarray = field(repr=False)

    @property
    def jam_fractions(self) -> np.ndarray:
        return self.jam_counts / self.n

    def to_dict(self) -> dict:
        return {
            "reps": self.reps,
            "mean": self.mean,
            "var": self.var,
            "scaled_var": self.scaled_var,
            "stderr": self.stderr,
            "bins": [float(b) for b in self.bins],
            "counts": [int(k) for k in self.counts],
        }

    def to_json(self) -> str:
        return json.dumps(_round_floats(self.to_dict()), indent=2) + "\n"

    def replications_csv(self) -> str:
        lines = ["rep_index,jam_count,jam_fraction"]
        for i, k in enumerate(self.jam_counts):
            lines.append(f"{i},{int(k)},{fmt(k / self.n)}")
        return "\n".join(lines) + "\n"


def fmt(x: float) -> str:
    """Nine significant digits."""
    return format(float(x), ".9g")


def _round_floats(obj):
    if isinstance(obj, float):
        return float(fmt(obj))
    if isinstance(obj, dict):
        return {k: _round_floats(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_round_floats(v) for v in obj]
    return obj


def summarize(jam_counts, n: int, bins="fd") -> McSummary:
    counts_arr = np.asarray(jam_counts, dtype=np.int64)
    fractions = counts_arr / n
    acc = fold(fractions)
    edges = np.histogram_bin_edges(fractions, bins=bins)
    hist, edges = np.histogram(fractions, bins=edges)
    var = acc.var
    return McSummary(
        n=n, reps=int(counts_arr.size), mean=acc.mean, var=var, scaled_var=n * var,
        stderr=math.sqrt(var / counts_arr.size), bins=edges, counts=hist, jam_counts=counts_arr,
    )


def run_replications(spec: ModelSpec, reps: int, master_seed: int,
                     parallelism: int | None = 1, bins="fd") -> McSummary:
    """Run ``reps`` replications of ``spec`` and summarize the jam fractions.

    ``parallelism=None`` uses every available core; the result is identical
    for every parallelism level.
    """
    if parallelism is None:
        parallelism = os.cpu_count() or 1
    counts = jam_counts(spec, reps, master_seed, parallelism)
    return summarize(counts, spec.params.n, bins)


@dataclass(frozen=True)
class CltReport:
    z_score: float
    variance_ratio: float
    ks_statistic: float
    ks_critical_1pct: float
    variance_to_mean: float
    zero_variance: bool

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def lattice_ks(counts) -> float:
    """Continuity-corrected KS distance of integer data from a fitted normal."""
    x = np.sort(np.asarray(counts, dtype=np.float64))
    mean = x.mean()
    sd = x.std(ddof=1)
    support = np.unique(x)
    upper = np.searchsorted(x, support, side="right") / x.size
    lower = np.searchsorted(x, support, side="left") / x.size
    d_up = np.abs(upper - stats.norm.cdf((support + 0.5 - mean) / sd))
    d_low = np.abs(lower - stats.norm.cdf((support - 0.5 - mean) / sd))
    return float(max(d_up.max(), d_low.max()))


def clt_check(summary: McSummary, params: Params, jstar: float, vstar: float) -> CltReport:
    """Compare a CRG/explore summary with the Gaussian limit N(J*, V*/n).

    * ``z_score``: ``sqrt(n) (mean - J*)`` measured in units of ``sqrt(V*/reps)``;
    * ``variance_ratio``: ``n Var / V*``;
    * ``ks_statistic``: Kolmogorov-Smirnov distance between the empirical law
      of the jam counts and the normal law with the sample mean and standard
      deviation, continuity-corrected for the integer lattice (the empirical
      CDF just below and at ``k`` is compared with the normal CDF at
      ``k - 1/2`` and ``k + 1/2``), with the asymptotic 1% critical value
      ``1.628 / sqrt(reps)``;
    * ``variance_to_mean``: ``V* / J*``, informational.
    """
    n = params.n
    reps = summary.reps
    zero_var = summary.var == 0.0
    if vstar > 0:
        z = math.sqrt(n) * (summary.mean - jstar) / math.sqrt(vstar / reps)
        ratio = summary.scaled_var / vstar
    else:
        z = 0.0 if summary.mean == jstar else math.copysign(math.inf, summary.mean - jstar)
        ratio = math.nan
    if zero_var or reps < 2:
        ks = math.nan
    else:
        ks = lattice_ks(summary.jam_counts)
    return CltReport(
        z_score=z, variance_ratio=ratio, ks_statistic=ks,
        ks_critical_1pct=1.628 / math.sqrt(reps),
        variance_to_mean=vstar / jstar if jstar > 0 else math.nan,
        zero_variance=zero_var,
    )
