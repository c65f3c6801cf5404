"""Analytic approximation chain for the signal-plus-clutter distribution.

The exact survival function of ``Z = |S + C|**2`` averages
``exp(-g(u) t)`` over a gamma-distributed ``u``, with

    g(u) = lam * mu * u / (mu * u + lam).

Expanding ``g`` about ``u = 1`` and keeping only the linear term makes the
gamma average available in closed form, which gives :func:`approx_cdf_exp`.
Dropping the exponential factor (negligible for large ``lam``) leaves a
Pareto law, :func:`approx_cdf_pareto`, whose scale tends to the clutter-only
scale as ``lam -> inf`` (:func:`limit_cdf`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .distributions import ParetoParams, Scenario, _check_positive, _nonneg, _out, pareto_cdf
from .errors import DomainError

__all__ = [
    "GContext",
    "TaylorSum",
    "g",
    "g_derivative",
    "taylor_partial_sum",
    "linearized_g",
    "validity_ratio",
    "companion_ratio",
    "effective_pareto",
    "approx_cdf_exp",
    "approx_cdf_pareto",
    "limit_cdf",
]


@dataclass(frozen=True)
class GContext:
    """``lam`` and ``mu`` with ``g(1) = lam mu / (lam + mu)`` cached."""

    lam: float
    mu: float

    def __post_init__(self):
        _check_positive("lam", self.lam)
        _check_positive("mu", self.mu)
        # lam*mu/(lam+mu) rather than 1/(1/lam + 1/mu): no cancellation for lam >> mu
        object.__setattr__(self, "g1", self.lam * self.mu / (self.lam + self.mu))

    @classmethod
    def from_scenario(cls, s: Scenario) -> "GContext":
        return cls(s.lam, s.mu)

    @property
    def taylor_radius(self) -> float:
        """Radius of convergence of the expansion about ``u = 1``."""
        return (self.lam + self.mu) / self.mu


class TaylorSum(NamedTuple):
    value: np.ndarray | float
    within_radius: np.ndarray | bool


def g(u, ctx: GContext):
    """``lam mu u / (mu u + lam)``: increasing from 0 towards ``lam``."""
    u = _nonneg(u, "u")
    return _out(ctx.lam * ctx.mu * u / (ctx.mu * u + ctx.lam))


def g_derivative(n: int, u, ctx: GContext):
    """n-th derivative of :func:`g`.

    ``(-1)**(n+1) n! / (mu lam**(n-1)) * (u/lam + 1/mu)**(-n-1)``
    """
    if int(n) != n or n < 1:
        raise DomainError("n must be a positive integer; use g() for n = 0")
    n = int(n)
    u = _nonneg(u, "u")
    lam, mu = ctx.lam, ctx.mu
    base = u / lam + 1.0 / mu
    log_mag = math.lgamma(n + 1) - math.log(mu) - (n - 1) * math.log(lam) - (n + 1) * np.log(base)
    sign = 1.0 if n % 2 == 1 else -1.0
    return _out(sign * np.exp(log_mag))


def taylor_partial_sum(u, order: int, ctx: GContext) -> TaylorSum:
    """Order-``order`` Taylor polynomial of ``g`` about ``u = 1``.

    Outside the radius ``|u - 1| < (lam + mu)/mu`` the partial sums diverge;
    this is reported in ``within_radius`` rather than raised.
    """
    if int(order) != order or order < 0:
        raise DomainError("order must be a nonnegative integer")
    u = _nonneg(u, "u")
    g1 = ctx.g1
    r = (g1 / ctx.lam) * (u - 1.0)
    total = np.zeros_like(u)
    term = np.ones_like(u)
    for k in range(1, int(order) + 1):
        term = term * r
        total = total + (term if k % 2 == 1 else -term)
    value = g1 + g1 * (ctx.lam / ctx.mu) * total
    within = np.abs(u - 1.0) < ctx.taylor_radius
    return TaylorSum(_out(value), bool(within) if np.ndim(within) == 0 else within)


def linearized_g(u, ctx: GContext):
    """First-order approximation ``g(1)**2 (u/mu + 1/lam)``."""
    u = _nonneg(u, "u")
    return _out(ctx.g1 ** 2 * (u / ctx.mu + 1.0 / ctx.lam))


def validity_ratio(ctx: GContext) -> float:
    """``g(1)/lam = mu/(lam + mu)``; the linearisation needs this to be small."""
    return ctx.mu / (ctx.lam + ctx.mu)


def companion_ratio(ctx: GContext) -> float:
    """``g(1) / mu = lam / (lam + mu)``; tends to 1 when ``lam >> mu``.

    This is the prefactor that makes the linear term ``g(1)**2 / mu`` close
    to ``mu`` in the valid regime.
    """
    return ctx.lam / (ctx.lam + ctx.mu)


def effective_pareto(s: Scenario) -> ParetoParams:
    """Pareto parameters of :func:`approx_cdf_pareto`.

    Shape ``alpha``, scale ``beta (lam + mu)**2 / (lam**2 mu)``.
    """
    lam, mu = s.lam, s.mu
    return ParetoParams(s.alpha, s.beta * ((lam + mu) / lam) ** 2 / mu)


def _rate(s: Scenario) -> float:
    # g(1)**2 / mu == lam**2 mu / (lam + mu)**2
    g1 = GContext.from_scenario(s).g1
    return g1 * g1 / s.mu


def approx_cdf_exp(t, s: Scenario):
    """Linearised CDF with the exponential factor retained.

    ``1 - (beta / (beta + g1**2 t / mu))**alpha * exp(-t g1**2 / lam)``
    """
    t = _nonneg(t)
    g1 = GContext.from_scenario(s).g1
    log_sf = -s.alpha * np.log1p(_rate(s) * t / s.beta) - t * (g1 * g1 / s.lam)
    return _out(-np.expm1(log_sf))


def approx_cdf_pareto(t, s: Scenario):
    """Linearised CDF without the exponential factor (a Pareto II law).

    ``1 - (beta / (beta + lam**2 mu t / (lam + mu)**2))**alpha``
    """
    t = _nonneg(t)
    return _out(-np.expm1(-s.alpha * np.log1p(_rate(s) * t / s.beta)))


def limit_cdf(t, s: Scenario):
    """``lam -> inf`` limit ``1 - (beta / (beta + mu t))**alpha``."""
    return pareto_cdf(t, ParetoParams(s.alpha, s.beta / s.mu))
