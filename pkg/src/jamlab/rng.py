"""Reproducible random streams and the exact variate generators built on them.

Generator: Philox4x64-10 (Salmon et al., Random123), key = (master_seed,
stream_index), 256-bit block counter starting at zero and incremented before
each block, four 64-bit outputs per block consumed in order. This is
bit-for-bit the sequence of ``numpy.random.Philox(key=master_seed +
(stream_index << 64))``; doubles are ``(u64 >> 11) * 2**-53`` as in
``numpy.random.Generator.random``. The kernels below are a numba port so that
streams can be created and consumed inside compiled loops.

Stream format version: ``STREAM_VERSION``. Any change to the generator, the
key/counter layout or to the variate algorithms below bumps it.

Variate algorithms (all exact):

* integers in ``[0, k)``: Lemire's multiply-shift with rejection.
* Poisson: sequential-search inversion for mean < 10, Hormann's PTRS
  transformed rejection otherwise.
* binomial: reflection to ``p <= 1/2``, then sequential-search inversion for
  ``n*p < 10`` and Hormann's BTRS transformed rejection otherwise.
* hypergeometric: sequential draws without replacement when the sample size
  is at most 64, otherwise inversion with the pmf ratio recurrence.
* geometric (failures before first success): ``floor(log1p(-u) / log1p(-p))``.
"""
from __future__ import annotations

import math

import numba
import numpy as np
from llvmlite import ir
from numba import types
from numba.extending import intrinsic

from .core import DomainError

STREAM_VERSION = 1

_U64 = np.uint64
_S11 = np.uint64(11)
_ONE = np.uint64(1)
_ZERO = np.uint64(0)
_FOUR = np.uint64(4)
_PHILOX_M0 = np.uint64(0xD2E7470EE14C6C93)
_PHILOX_M1 = np.uint64(0xCA5A826395121157)
_PHILOX_W0 = np.uint64(0x9E3779B97F4A7C15)
_PHILOX_W1 = np.uint64(0xBB67AE8584CAA73B)
_TWO_M53 = 1.0 / 9007199254740992.0

# state layout: key[0:2], counter[2:6], buffer[6:10], buffer position[10]
STATE_SIZE = 11

_MASK64 = (1 << 64) - 1


@intrinsic
def _mulhilo(typingctx, a, b):
    """Full 64 x 64 -> 128-bit product as ``(hi, lo)``, one native multiply."""
    if a != types.uint64 or b != types.uint64:
        return None
    sig = types.UniTuple(types.uint64, 2)(types.uint64, types.uint64)

    def codegen(context, builder, signature, args):
        i64 = ir.IntType(64)
        i128 = ir.IntType(128)
        wide = builder.mul(builder.zext(args[0], i128), builder.zext(args[1], i128))
        hi = builder.trunc(builder.lshr(wide, ir.Constant(i128, 64)), i64)
        lo = builder.trunc(wide, i64)
        return context.make_tuple(builder, signature.return_type, (hi, lo))

    return sig, codegen


@numba.njit(cache=True, inline="always")
def _philox_block(st):
    # increment the 256-bit counter
    for i in range(2, 6):
        st[i] += _ONE
        if st[i] != _ZERO:
            break
    c0, c1, c2, c3 = st[2], st[3], st[4], st[5]
    k0, k1 = st[0], st[1]
    for r in range(10):
        if r > 0:
            k0 += _PHILOX_W0
            k1 += _PHILOX_W1
        hi0, lo0 = _mulhilo(_PHILOX_M0, c0)
        hi1, lo1 = _mulhilo(_PHILOX_M1, c2)
        c0, c1, c2, c3 = hi1 ^ c1 ^ k0, lo1, hi0 ^ c3 ^ k1, lo0
    st[6] = c0
    st[7] = c1
    st[8] = c2
    st[9] = c3
    st[10] = _ZERO


@numba.njit(cache=True, inline="always")
def next_u64(st):
    if st[10] >= _FOUR:
        _philox_block(st)
    pos = np.int64(st[10])
    st[10] += _ONE
    return st[6 + pos]


@numba.njit(cache=True, inline="always")
def next_double(st):
    return np.float64(next_u64(st) >> _S11) * _TWO_M53


@numba.njit(cache=True)
def init_state(st, seed, index):
    st[0] = seed
    st[1] = index
    for i in range(2, 10):
        st[i] = _ZERO
    st[10] = _FOUR


@numba.njit(cache=True)
def new_state(seed, index):
    st = np.empty(STATE_SIZE, dtype=np.uint64)
    init_state(st, seed, index)
    return st


@numba.njit(cache=True, inline="always")
def randint(st, k):
    """Uniform integer in ``[0, k)`` for ``k >= 1`` (Lemire)."""
    ku = np.uint64(k)
    hi, lo = _mulhilo(next_u64(st), ku)
    if lo < ku:
        thresh = (_ZERO - ku) % ku
        while lo < thresh:
            hi, lo = _mulhilo(next_u64(st), ku)
    return np.int64(hi)


@numba.njit(cache=True)
def shuffle(st, arr):
    """In-place Fisher-Yates shuffle."""
    for i in range(arr.size - 1, 0, -1):
        j = randint(st, i + 1)
        tmp = arr[i]
        arr[i] = arr[j]
        arr[j] = tmp


@numba.njit(cache=True)
def permutation(st, n):
    arr = np.arange(n)
    shuffle(st, arr)
    return arr


@numba.njit(cache=True)
def poisson(st, lam):
    if lam <= 0.0:
        return 0
    if lam < 10.0:
        u = next_double(st)
        p = math.exp(-lam)
        s = p
        k = 0
        while u > s:
            k += 1
            p *= lam / k
            s += p
            if p == 0.0 and k > lam:
                # roundoff tail: restart
                u = next_double(st)
                p = math.exp(-lam)
                s = p
                k = 0
        return k
    # PTRS
    slam = math.sqrt(lam)
    loglam = math.log(lam)
    b = 0.931 + 2.53 * slam
    a = -0.059 + 0.02483 * b
    invalpha = 1.1239 + 1.1328 / (b - 3.4)
    vr = 0.9277 - 3.6224 / (b - 2.0)
    while True:
        u = next_double(st) - 0.5
        v = next_double(st)
        us = 0.5 - abs(u)
        k = math.floor((2.0 * a / us + b) * u + lam + 0.43)
        if us >= 0.07 and v <= vr:
            return np.int64(k)
        if k < 0 or (us < 0.013 and v > us):
            continue
        if (math.log(v) + math.log(invalpha) - math.log(a / (us * us) + b)
                <= -lam + k * loglam - math.lgamma(k + 1.0)):
            return np.int64(k)


@numba.njit(cache=True)
def _binomial_inversion(st, n, p):
    q = 1.0 - p
    s = p / q
    a = (n + 1) * s
    r0 = math.exp(n * math.log1p(-p))
    while True:
        r = r0
        u = next_double(st)
        x = 0
        while u > r:
            u -= r
            x += 1
            if x > n:
                break
            r *= a / x - s
        if x <= n:
            return np.int64(x)


@numba.njit(cache=True)
def _binomial_btrs(st, n, p):
    q = 1.0 - p
    spq = math.sqrt(n * p * q)
    b = 1.15 + 2.53 * spq
    a = -0.0873 + 0.0248 * b + 0.01 * p
    c = n * p + 0.5
    alpha = (2.83 + 5.1 / b) * spq
    vr = 0.92 - 4.2 / b
    m = math.floor((n + 1) * p)
    lpq = math.log(p / q)
    h = math.lgamma(m + 1.0) + math.lgamma(n - m + 1.0)
    while True:
        u = next_double(st) - 0.5
        v = next_double(st)
        us = 0.5 - abs(u)
        k = math.floor((2.0 * a / us + b) * u + c)
        if k < 0 or k > n:
            continue
        if us >= 0.07 and v <= vr:
            return np.int64(k)
        v = math.log(v * alpha / (a / (us * us) + b))
        if v <= h - math.lgamma(k + 1.0) - math.lgamma(n - k + 1.0) + (k - m) * lpq:
            return np.int64(k)


@numba.njit(cache=True)
def binomial(st, n, p):
    if n <= 0 or p <= 0.0:
        return 0
    if p >= 1.0:
        return np.int64(n)
    if p > 0.5:
        return np.int64(n) - binomial(st, n, 1.0 - p)
    if n * p < 10.0:
        return _binomial_inversion(st, n, p)
    return _binomial_btrs(st, n, p)


@numba.njit(cache=True)
def hypergeometric(st, good, population, draws):
    """Number of favourable items in ``draws`` draws without replacement."""
    if draws <= 64:
        g = good
        pop = population
        k = 0
        for _ in range(draws):
            if g > 0 and next_double(st) * pop < g:
                k += 1
                g -= 1
            pop -= 1
        return np.int64(k)
    bad = population - good
    kmin = max(0, draws - bad)
    kmax = min(good, draws)
    logp = (math.lgamma(good + 1.0) - math.lgamma(kmin + 1.0) - math.lgamma(good - kmin + 1.0)
            + math.lgamma(bad + 1.0) - math.lgamma(draws - kmin + 1.0)
            - math.lgamma(bad - draws + kmin + 1.0)
            - (math.lgamma(population + 1.0) - math.lgamma(draws + 1.0)
               - math.lgamma(population - draws + 1.0)))
    pk = math.exp(logp)
    u = next_double(st)
    k = kmin
    cdf = pk
    while u > cdf and k < kmax:
        pk *= (good - k) * (draws - k) / ((k + 1.0) * (bad - draws + k + 1.0))
        k += 1
        cdf += pk
    return np.int64(k)


@numba.njit(cache=True)
def geometric_skip(st, log1mp):
    """Failures before the first success; ``log1mp = log1p(-p)``, ``p in (0, 1)``."""
    u = next_double(st)
    g = math.floor(math.log1p(-u) / log1mp)
    if g > 4.0e18:
        return np.int64(4e18)
    return np.int64(g)


@numba.njit(cache=True)
def _fill_doubles(st, out):
    for i in range(out.size):
        out[i] = next_double(st)


@numba.njit(cache=True)
def _fill_u64(st, out):
    for i in range(out.size):
        out[i] = next_u64(st)


def _as_u64(value: int, what: str) -> int:
    v = int(value)
    if v < 0 or v > _MASK64:
        raise DomainError(f"{what} must lie in [0, 2**64), got {value!r}")
    return v


class RngStream:
    """One reproducible random stream, identified by ``(master_seed, stream_index)``.

    A stream is single-owner: it carries mutable position state and must not
    be shared between concurrent tasks. Derive a new index instead.
    """

    __slots__ = ("master_seed", "stream_index", "state")

    def __init__(self, master_seed: int, stream_index: int = 0):
        self.master_seed = _as_u64(master_seed, "master_seed")
        self.stream_index = _as_u64(stream_index, "stream_index")
        self.state = new_state(np.uint64(self.master_seed), np.uint64(self.stream_index))

    def __repr__(self):
        return f"RngStream(master_seed={self.master_seed}, stream_index={self.stream_index})"

    def to_numpy(self) -> np.random.Generator:
        """A numpy Generator positioned at the start of this stream."""
        key = self.master_seed + (self.stream_index << 64)
        return np.random.Generator(np.random.Philox(key=key))

    def raw(self, size: int) -> np.ndarray:
        out = np.empty(size, dtype=np.uint64)
        _fill_u64(self.state, out)
        return out

    def random(self, size: int | None = None):
        if size is None:
            return float(next_double(self.state))
        out = np.empty(size, dtype=np.float64)
        _fill_doubles(self.state, out)
        return out

    def integers(self, k: int) -> int:
        if k < 1:
            raise DomainError("k must be >= 1")
        return int(randint(self.state, k))

    def permutation(self, n: int) -> np.ndarray:
        return permutation(self.state, n)

    def poisson(self, lam: float) -> int:
        if not lam >= 0:
            raise DomainError("Poisson mean must be non-negative")
        return int(poisson(self.state, float(lam)))

    def binomial(self, n: int, p: float) -> int:
        if n < 0 or not 0.0 <= p <= 1.0:
            raise DomainError("binomial requires n >= 0 and p in [0, 1]")
        return int(binomial(self.state, int(n), float(p)))

    def hypergeometric(self, good: int, population: int, draws: int) -> int:
        if not (0 <= good <= population and 0 <= draws <= population):
            raise DomainError("hypergeometric requires 0 <= good, draws <= population")
        return int(hypergeometric(self.state, int(good), int(population), int(draws)))


def rng_derive(master_seed: int, stream_index: int) -> RngStream:
    return RngStream(master_seed, stream_index)
