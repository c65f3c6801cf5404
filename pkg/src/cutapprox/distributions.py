"""Clutter and target model: Pareto Type II intensity, inverse-gamma texture.

The clutter return is compound Gaussian, ``C = K * G``, where ``G`` is a
zero-mean circular complex Gaussian with per-component variance ``1/(2 mu)``
and ``K`` is an independent texture with ``K**2`` inverse-gamma distributed
(shape ``alpha``, scale ``beta``).  The clutter intensity ``|C|**2`` is then
Pareto Type II with shape ``alpha`` and scale ``beta / mu``.  The usual
textbook form ``1 - (beta / (t + beta))**alpha`` is the ``mu = 1``
normalisation of that law.

The target ``S`` is a zero-mean circular complex Gaussian with per-component
variance ``1/(2 lam)``, so its mean power is ``1/lam``.

All samplers take an explicit :class:`numpy.random.Generator`.  Use
:func:`make_stream` to obtain counter-based (Philox) streams keyed by a
``(seed, stream_id)`` pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import DomainError

__all__ = [
    "Scenario",
    "ParetoParams",
    "ComplexSample",
    "make_stream",
    "clutter_pareto",
    "pareto_pdf",
    "pareto_cdf",
    "pareto_sf",
    "pareto_quantile",
    "speckle_pdf",
    "sample_speckle",
    "sample_clutter",
    "sample_signal",
]

_MASK64 = (1 << 64) - 1


def _check_positive(name, value):
    if not (isinstance(value, (int, float, np.integer, np.floating)) and math.isfinite(value) and value > 0):
        raise DomainError(f"{name} must be a finite positive number, got {value!r}")


@dataclass(frozen=True)
class Scenario:
    """Model parameters for clutter and target.

    Parameters
    ----------
    alpha : float
        Pareto shape of the clutter intensity (texture shape).
    beta : float
        Texture scale.  The clutter intensity scale is ``beta / mu``.
    lam : float
        Reciprocal of the mean target power.
    mu : float
        Reciprocal of the mean Gaussian-speckle intensity.
    """

    alpha: float
    beta: float
    lam: float
    mu: float

    def __post_init__(self):
        for name in ("alpha", "beta", "lam", "mu"):
            _check_positive(name, getattr(self, name))

    @property
    def signal_power(self) -> float:
        return 1.0 / self.lam

    def with_lambda(self, lam: float) -> "Scenario":
        return Scenario(self.alpha, self.beta, lam, self.mu)


@dataclass(frozen=True)
class ParetoParams:
    """Pareto Type II (Lomax) parameters."""

    shape: float
    scale: float

    def __post_init__(self):
        _check_positive("shape", self.shape)
        _check_positive("scale", self.scale)


@dataclass(frozen=True)
class ComplexSample:
    """In-phase and quadrature components of complex draws."""

    re: np.ndarray
    im: np.ndarray

    @property
    def intensity(self) -> np.ndarray:
        return self.re * self.re + self.im * self.im


def make_stream(seed: int, stream_id: int = 0) -> np.random.Generator:
    """Return a Philox generator keyed by ``(seed, stream_id)``.

    The 128-bit Philox key holds the 64-bit seed in its low word and the
    stream id in its high word, so distinct pairs give independent streams
    and a fixed pair always reproduces the same draws.
    """
    if seed < 0 or stream_id < 0:
        raise DomainError("seed and stream_id must be nonnegative")
    key = (int(seed) & _MASK64) | ((int(stream_id) & _MASK64) << 64)
    return np.random.Generator(np.random.Philox(key=key))


def clutter_pareto(s: Scenario) -> ParetoParams:
    """Pareto parameters of the clutter-only intensity ``|C|**2``."""
    return ParetoParams(s.alpha, s.beta / s.mu)


def _nonneg(t, name="t"):
    t = np.asarray(t, dtype=float)
    if np.any(t < 0) or np.any(np.isnan(t)):
        raise DomainError(f"{name} must be nonnegative")
    return t


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def pareto_pdf(t, p: ParetoParams):
    """Density ``shape * scale**shape / (t + scale)**(shape + 1)``."""
    t = _nonneg(t)
    a, b = p.shape, p.scale
    return _out(a / b * np.exp(-(a + 1.0) * np.log1p(t / b)))


def pareto_sf(t, p: ParetoParams):
    """Survival function ``(scale / (t + scale))**shape``."""
    t = _nonneg(t)
    return _out(np.exp(-p.shape * np.log1p(t / p.scale)))


def pareto_cdf(t, p: ParetoParams):
    """Distribution function ``1 - (scale / (t + scale))**shape``."""
    t = _nonneg(t)
    return _out(-np.expm1(-p.shape * np.log1p(t / p.scale)))


def pareto_quantile(q, p: ParetoParams):
    """Inverse of :func:`pareto_cdf` for ``0 <= q < 1``."""
    q = np.asarray(q, dtype=float)
    if np.any(q < 0) or np.any(q >= 1) or np.any(np.isnan(q)):
        raise DomainError("q must lie in [0, 1)")
    return _out(p.scale * np.expm1(-np.log1p(-q) / p.shape))


def speckle_pdf(k, s: Scenario):
    """Density of the texture amplitude ``K``.

    ``2 beta**alpha / Gamma(alpha) * k**(-2 alpha - 1) * exp(-beta / k**2)``;
    the factor 2 comes from the change of variable ``K = sqrt(V)`` with ``V``
    inverse-gamma and makes the density integrate to one.
    """
    k = np.asarray(k, dtype=float)
    if np.any(k <= 0):
        raise DomainError("k must be positive")
    a, b = s.alpha, s.beta
    logf = math.log(2.0) + a * math.log(b) - gammaln(a) - (2 * a + 1) * np.log(k) - b / (k * k)
    return _out(np.exp(logf))


def sample_speckle(s: Scenario, rng: np.random.Generator, size=None):
    """Draw texture amplitudes ``K = W**-0.5`` with ``W ~ Gamma(alpha, rate=beta)``."""
    w = rng.gamma(s.alpha, 1.0 / s.beta, size)
    return w ** -0.5


def _complex_gaussian(variance, rng, size):
    sd = math.sqrt(variance)
    re = rng.normal(0.0, sd, size)
    im = rng.normal(0.0, sd, size)
    return re, im


def sample_clutter(s: Scenario, rng: np.random.Generator, size=None) -> ComplexSample:
    """Draw clutter returns ``K * G``; draw order is texture, then speckle."""
    k = sample_speckle(s, rng, size)
    re, im = _complex_gaussian(0.5 / s.mu, rng, size)
    return ComplexSample(k * re, k * im)


def sample_signal(s: Scenario, rng: np.random.Generator, size=None) -> ComplexSample:
    """Draw target returns with per-component variance ``1/(2 lam)``."""
    re, im = _complex_gaussian(0.5 / s.lam, rng, size)
    return ComplexSample(re, im)
