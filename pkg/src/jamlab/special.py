"""Regularized incomplete beta, the dimension-to-clustering map and graph clustering."""
from __future__ import annotations

import math

import numba
import numpy as np
from scipy import integrate

from .core import DomainError, Graph, NumericalError, UndefinedValueError

MAX_DIM = 64

_CF_EPS = 1e-16
_CF_TINY = 1e-300
_CF_MAXIT = 10_000


@numba.njit(cache=True)
def _betacf(z, a, b):
    # modified Lentz evaluation of the continued fraction for I_z(a, b)
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * z / qap
    if abs(d) < _CF_TINY:
        d = _CF_TINY
    d = 1.0 / d
    h = d
    for m in range(1, _CF_MAXIT + 1):
        m2 = 2 * m
        aa = m * (b - m) * z / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * z / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_EPS:
            return h, True
    return h, False


@numba.njit(cache=True)
def _inc_beta_reg(z, a, b):
    if z <= 0.0:
        return 0.0, True
    if z >= 1.0:
        return 1.0, True
    lbeta = math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
    front = math.exp(lbeta + a * math.log(z) + b * math.log1p(-z))
    if z < (a + 1.0) / (a + b + 2.0):
        cf, ok = _betacf(z, a, b)
        return front * cf / a, ok
    cf, ok = _betacf(1.0 - z, b, a)
    return 1.0 - front * cf / b, ok


def inc_beta_reg(z: float, a: float, b: float) -> float:
    """Regularized incomplete beta ``I_z(a, b)``.

    Continued fraction with the usual switch to ``1 - I_{1-z}(b, a)`` for
    ``z > (a+1)/(a+b+2)``, where the fraction converges fast.
    """
    if not (0.0 <= z <= 1.0) or not a > 0 or not b > 0:
        raise DomainError(f"inc_beta_reg needs z in [0,1], a > 0, b > 0; got {z}, {a}, {b}")
    value, ok = _inc_beta_reg(float(z), float(a), float(b))
    if not ok:
        raise NumericalError(f"continued fraction did not converge for z={z}, a={a}, b={b}")
    return value


def _check_dim(d) -> int:
    if isinstance(d, bool) or int(d) != d or not 1 <= d <= MAX_DIM:
        raise DomainError(f"dimension must be an integer in [1, {MAX_DIM}], got {d!r}")
    return int(d)


def alpha_d(d: int) -> float:
    """Clustering level of the random geometric graph in dimension ``d``.

    ``d * int_0^1 x^(d-1) I_{1-x^2/4}((d+1)/2, 1/2) dx``: the probability
    that two uniform points of a ball of radius ``2r`` lie within ``2r`` of
    each other.
    """
    d = _check_dim(d)
    a = 0.5 * (d + 1)

    def integrand(x):
        return d * x ** (d - 1) * _inc_beta_reg(1.0 - 0.25 * x * x, a, 0.5)[0]

    value, err = integrate.quad(integrand, 0.0, 1.0, epsabs=1e-13, epsrel=1e-12, limit=200)
    if err > 1e-9:
        raise NumericalError(f"alpha_d quadrature error estimate {err:.3g} too large")
    return value


def alpha_table(dmax: int) -> dict[int, float]:
    dmax = _check_dim(dmax)
    return {d: alpha_d(d) for d in range(1, dmax + 1)}


@numba.njit(cache=True)
def _triangles_wedges(n, indptr, indices):
    triangles = 0
    wedges = 0
    for u in range(n):
        deg = indptr[u + 1] - indptr[u]
        wedges += deg * (deg - 1) // 2
        for k in range(indptr[u], indptr[u + 1]):
            v = indices[k]
            if v <= u:
                continue
            # count w > v adjacent to both u and v by merging sorted rows
            i = indptr[u]
            j = indptr[v]
            ie = indptr[u + 1]
            je = indptr[v + 1]
            while i < ie and j < je:
                a = indices[i]
                b = indices[j]
                if a < b:
                    i += 1
                elif b < a:
                    j += 1
                else:
                    if a > v:
                        triangles += 1
                    i += 1
                    j += 1
    return triangles, wedges


def triangle_count(graph: Graph) -> int:
    return int(_triangles_wedges(graph.n, graph.indptr, graph.indices)[0])


def empirical_clustering(graph: Graph) -> float:
    """Fraction of wedges (paths of length two) that are closed: ``3 T / W``."""
    tri, wedges = _triangles_wedges(graph.n, graph.indptr, graph.indices)
    if wedges == 0:
        raise UndefinedValueError("graph has no wedges; clustering is undefined")
    return 3.0 * tri / wedges
