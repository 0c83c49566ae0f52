"""Deterministic large-n limits of RSA on the clustered random graph.

The scaled count of unexplored vertices follows the linear ODE

    x'(t) = -1 - ((mu - 1) / y(t) + lam) x(t),   x(0) = 1,   y(t) = 1 - mu t,

whose solution is

    x(t) = exp(-lam t) (1 - mu t)^((mu-1)/mu) (1 - I(t)),
    I(t) = int_0^t exp(lam s) (1 - mu s)^(1/mu - 1) ds.

The jamming fraction is the first zero of x, i.e. the root of I(t) = 1.
With ``u = (1 - mu s)^(1/mu)`` the integral becomes

    I(t) = int_{u(t)}^1 exp(lam (1 - u^mu) / mu) du,

which has a bounded, smooth integrand on [0, 1]; every evaluation below goes
through this form.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .core import DomainError, NumericalError, Params

_BISECT_TOL = 1e-6


def _mf_params(params: Params) -> tuple[float, float]:
    return params.mu, params.lam


def _u_of_t(mu: float, t: float) -> float:
    return (1.0 - mu * t) ** (1.0 / mu)


def _t_of_u(mu: float, u: float) -> float:
    return (1.0 - u ** mu) / mu


def _integral_u(mu: float, lam: float, u: float) -> float:
    """``int_u^1 exp(lam (1 - v^mu) / mu) dv``."""
    if u >= 1.0:
        return 0.0
    if lam == 0.0:
        return 1.0 - u
    if mu == 1.0:
        # closed form exp(lam (1 - v)) antiderivative
        return math.expm1(lam * (1.0 - u)) / lam
    k = lam / mu

    def g(v):
        return math.exp(k * (1.0 - v ** mu))

    value, err = integrate.quad(g, u, 1.0, epsabs=1e-14, epsrel=1e-13, limit=200)
    if err > 1e-10 * max(1.0, value):
        raise NumericalError(f"quadrature error estimate {err:.3g} too large")
    return value


def blocking_integral(params: Params, t: float) -> float:
    """``I(t) = int_0^t exp(lam s)(1 - mu s)^(1/mu - 1) ds`` for ``0 <= t <= 1/mu``."""
    mu, lam = _mf_params(params)
    if t < 0 or mu * t > 1.0:
        raise DomainError(f"t must lie in [0, 1/mu] = [0, {1 / mu:.6g}], got {t}")
    return _integral_u(mu, lam, _u_of_t(mu, t))


def fluid_x(params: Params, t: float) -> float:
    """Fluid-limit fraction of unexplored vertices at scaled time ``t < 1/mu``."""
    mu, lam = _mf_params(params)
    if t < 0 or mu * t >= 1.0:
        raise DomainError(f"t must lie in [0, 1/mu) = [0, {1 / mu:.6g}), got {t}")
    y = 1.0 - mu * t
    return math.exp(-lam * t) * y ** ((mu - 1.0) / mu) * (1.0 - blocking_integral(params, t))


def fluid_y(params: Params, t: float) -> float:
    return 1.0 - params.mu * t


def jamming_fraction(params: Params, tol: float = 1e-12) -> float:
    """Limiting jamming fraction J*(c, alpha): the smallest root of the fluid limit.

    Bisection on the regularized variable ``u`` down to a bracket width of
    1e-6, then Newton steps (the derivative of the integral is the integrand)
    until ``|I(J*) - 1| <= tol``, the residual measured at the root in ``u``.
    """
    if not tol > 0:
        raise DomainError("tol must be positive")
    mu, lam = _mf_params(params)
    if params.c == 0.0:
        return 1.0
    if lam == 0.0:
        return 1.0 / mu
    if mu == 1.0:
        return math.log1p(lam) / lam
    return _t_of_u(mu, _jamming_u(mu, lam, tol))


def _jamming_u(mu: float, lam: float, tol: float) -> float:
    """Root ``u* = (1 - mu J*)^(1/mu)`` of ``I = 1`` for ``lam > 0``."""

    def resid(u):
        return _integral_u(mu, lam, u) - 1.0

    k = lam / mu
    lo, hi = 0.0, 1.0  # resid(lo) > 0 > resid(hi)
    if resid(lo) <= 0.0:
        raise NumericalError("no sign change of I(t) - 1 on (0, 1/mu)")
    while hi - lo > _BISECT_TOL:
        mid = 0.5 * (lo + hi)
        if resid(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    u = 0.5 * (lo + hi)
    for _ in range(50):
        r = resid(u)
        if abs(r) <= tol:
            break
        step = r / math.exp(k * (1.0 - u ** mu))  # d resid / du = -integrand
        u_new = u + step
        if not lo <= u_new <= hi:
            u_new = 0.5 * (lo + hi)
        if r > 0:
            lo = max(lo, u)
        else:
            hi = min(hi, u)
        u = u_new
    else:
        raise NumericalError("Newton refinement of the jamming root did not converge")
    if abs(resid(u)) > tol:
        raise NumericalError("jamming root did not reach the requested tolerance")
    return u


def jamming_large_c(params: Params) -> float:
    """Large-density approximation ``1 / (1 + alpha c)``."""
    return 1.0 / params.mu


def jamming_lower_bound(params: Params) -> float:
    """``(1/mu) (1 - exp(-mu exp(-lam/mu)))``, a lower bound on J*."""
    mu, lam = _mf_params(params)
    return (1.0 - math.exp(-mu * math.exp(-lam / mu))) / mu


@dataclass(frozen=True)
class FluidSolution:
    grid: np.ndarray
    x: np.ndarray
    y: np.ndarray
    jstar: float


def fluid_solution(params: Params, num: int = 201, tol: float = 1e-12) -> FluidSolution:
    """Sample x(t) and y(t) on an even grid over ``[0, J*]``."""
    jstar = jamming_fraction(params, tol)
    grid = np.linspace(0.0, jstar, num)
    if params.c == 0.0 or params.lam == 0.0:
        # J* = 1/mu sits on the edge of the domain of the closed form
        x = np.array([fluid_x(params, t) if params.mu * t < 1.0 else 0.0 for t in grid])
    else:
        x = np.array([fluid_x(params, t) for t in grid])
    x[-1] = 0.0
    return FluidSolution(grid, x, 1.0 - params.mu * grid, jstar)


@dataclass(frozen=True)
class VarianceSolution:
    grid: np.ndarray
    sigma_xx: np.ndarray
    sigma_xy: np.ndarray
    vstar: float
    jstar: float


def _variance_rhs(mu, lam, sigma2):
    """Right-hand side in the variable ``u = y^(1/mu)``, ``dt/du = -u^(mu-1)``.

    For small ``lam / mu`` the root ``J*`` lies within rounding of ``1/mu`` in
    ``t`` while ``u*`` stays well inside (0, 1), so integrating in ``u``
    keeps the ``1/y`` terms resolvable.
    """
    def rhs(u, z):
        x, sxx, sxy = z
        y = u ** mu
        t = (1.0 - y) / mu
        dt_du = -(u ** (mu - 1.0))
        drift = (mu - 1.0) / y + lam
        f = -drift
        g = (mu - 1.0) * x / (y * y)
        beta = drift * x
        # sigma * sqrt(beta) * rho folds to sigma2 * x / y, finite even when sigma = 0
        cross = sigma2 * x / y
        return [
            dt_du * (-1.0 - drift * x),
            dt_du * (2.0 * sxx * f + 2.0 * sxy * g + beta),
            dt_du * (sxy * f + t * g * sigma2 + cross),
        ]
    return rhs


# lam = 0: x and y vanish together at 1/mu; the path is integrated up to this u
_U_FLOOR = 1e-8


def variance_solution(params: Params, tol: float = 1e-10, num: int = 201) -> VarianceSolution:
    """Integrate the covariance ODEs of the diffusion limit from 0 to J*.

    ``sigma_yy(t) = sigma2 * t`` is substituted in closed form, so only
    ``x``, ``sigma_xx`` and ``sigma_xy`` are integrated (DOP853 in the
    regularized variable ``u``, relative tolerance ``tol / 10``).

    The hitting-time variance is ``sigma_xx(J*) / x'(J*)^2``. Whenever
    ``lam > 0`` the fluid path crosses zero with ``y > 0`` and slope ``-1``, so
    ``V* = sigma_xx(J*)``. With ``lam = 0`` (alpha = 1) ``x = y`` and the slope is
    ``-mu``, giving ``V* = sigma2 / mu^3``, the renewal-theory variance of the
    household count.
    """
    if not tol > 0:
        raise DomainError("tol must be positive")
    jstar = jamming_fraction(params, min(tol, 1e-12))
    grid = np.linspace(0.0, jstar, num)
    if params.c == 0.0:
        zeros = np.zeros(num)
        return VarianceSolution(grid, zeros, zeros.copy(), 0.0, jstar)
    mu, lam, sigma2 = params.mu, params.lam, params.sigma2
    if mu == 1.0:
        u_end = 1.0 - mu * jstar
    elif lam == 0.0:
        u_end = _U_FLOOR
    else:
        u_end = _jamming_u(mu, lam, min(tol, 1e-12))
    u_grid = np.array([_u_of_t(mu, t) for t in grid])
    u_grid[-1] = u_end
    u_grid = np.maximum(u_grid, u_end)
    sol = integrate.solve_ivp(
        _variance_rhs(mu, lam, sigma2), (1.0, u_end), [1.0, 0.0, 0.0],
        method="DOP853", t_eval=u_grid, rtol=tol / 10.0, atol=tol * 1e-3,
    )
    if not sol.success:
        raise NumericalError(f"variance ODE integration failed: {sol.message}")
    sxx = sol.y[1]
    vstar = sigma2 / mu**3 if lam == 0.0 else float(sxx[-1])
    return VarianceSolution(grid, sxx, sol.y[2], vstar, jstar)


def variance(params: Params, tol: float = 1e-10) -> float:
    """Limiting variance V*(c, alpha) of ``sqrt(n) (J_n - J*)``."""
    return variance_solution(params, tol).vstar
