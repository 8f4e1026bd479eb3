"""Fading laws and link-budget algebra.

Everything here works in linear units; decibel inputs are converted once by
:mod:`leocov.config`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .numerics import SeriesSpec, sum_series

SPEED_OF_LIGHT = 299_792_458.0


@dataclass(frozen=True)
class SRFadingParams:
    """Shadowed-Rician power law: LOS power ``omega``, scatter power ``2*b0``, Nakagami ``m``."""

    omega: float = 1.29
    b0: float = 0.158
    m: float = 19.4

    def __post_init__(self):
        for name in ("omega", "b0", "m"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")

    @property
    def beta(self) -> float:
        return self.omega / (2.0 * self.b0 * self.m + self.omega)

    @property
    def prefactor(self) -> float:
        return (2.0 * self.b0 * self.m / (2.0 * self.b0 * self.m + self.omega)) ** self.m

    @property
    def mean_power(self) -> float:
        return self.omega + 2.0 * self.b0


@dataclass(frozen=True)
class LinkBudget:
    """Linear-unit link budget.

    ``gr2`` is the receive power gain G_R**2, ``rain_s`` the amplitude
    factor ``s`` and ``xi`` the satellite antenna factor; the S-GW path
    loss is ``|lambda G_R s xi / (4 pi D)|**2`` (the propagation phase has
    unit modulus and drops out).
    """

    carrier_freq: float = 20e9
    rho_s: float = 10 ** 1.5
    rho_g: float = 10 ** 1.5
    rho_a: float = 10 ** 1.5
    sigma2_g: float = 3.6e-12
    sigma2_u: float = 1e-8
    gr2: float = 10 ** 4.17
    rain_s: float = 10 ** (-3.125 / 20)
    xi: float = 1.0
    alpha: float = 3.0

    def __post_init__(self):
        for name in ("carrier_freq", "rho_s", "rho_g", "rho_a", "sigma2_g",
                     "sigma2_u", "gr2", "rain_s", "xi", "alpha"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_freq


@dataclass(frozen=True)
class Thresholds:
    gamma_g: float = 1.0
    gamma_u: float = 1.0

    def __post_init__(self):
        if not (self.gamma_g > 0 and self.gamma_u > 0):
            raise ValueError("SNR thresholds must be positive")

    @classmethod
    def common(cls, gamma: float) -> "Thresholds":
        return cls(gamma, gamma)


def link_constant(lb: LinkBudget, th: Thresholds) -> float:
    """Smallest ``W_s**2 / D**2`` (in 1/m^2) that keeps the S-GW SNR above threshold."""
    denom = lb.rho_s * lb.wavelength ** 2 * lb.gr2 * lb.rain_s ** 2 * lb.xi ** 2
    if denom == 0:
        raise ValueError("link budget has zero gain")
    return 16.0 * math.pi ** 2 * th.gamma_g * lb.sigma2_g / denom


def sr_weight_ratio_bound(p: SRFadingParams, z: int) -> float:
    """Bound on w[k+1]/w[k] for all k >= z, with w[k] = (m)_k beta^k / k!."""
    # the ratio beta (m+k)/(k+1) tends monotonically to beta
    return max(p.beta * (p.m + z) / (z + 1), p.beta)


def sr_weights(p: SRFadingParams):
    """Yield ``(m)_z beta^z / z!`` for z = 0, 1, ... by recurrence."""
    w = 1.0
    z = 0
    beta = p.beta
    while True:
        yield w
        w *= beta * (p.m + z) / (z + 1)
        z += 1


def sr_cdf(t, p: SRFadingParams, tol: float = 1e-10, max_terms: int = 10_000):
    """CDF of the shadowed-Rician fading power at ``t`` (scalar or array).

    Uses the gamma-mixture series: prefactor * sum_z w_z * P(z+1, t/(2 b0))
    with P the regularized lower incomplete gamma. Since P <= 1 and is
    decreasing in z, the weight ratio bound certifies the tail.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be non-negative")
    x = t / (2.0 * p.b0)
    pref = p.prefactor

    def terms():
        for z, w in enumerate(sr_weights(p)):
            yield pref * w * special.gammainc(z + 1, x)

    res = sum_series(SeriesSpec(terms(), lambda z: sr_weight_ratio_bound(p, z),
                                tolerance=tol, max_terms=max_terms))
    out = np.clip(res.value, 0.0, 1.0)
    return out[()] if np.ndim(out) == 0 else out


def sr_ccdf(t, p: SRFadingParams, tol: float = 1e-10, max_terms: int = 10_000):
    """Complementary CDF, summed directly as prefactor * sum_z w_z * Q(z+1, t/(2 b0)).

    The mixture weights sum to one after the prefactor, so this equals
    ``1 - sr_cdf`` without the cancellation when the result is small.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be non-negative")
    x = t / (2.0 * p.b0)
    pref = p.prefactor
    weights = []

    def terms():
        for z, w in enumerate(sr_weights(p)):
            weights.append(w)
            yield pref * w * special.gammaincc(z + 1, x)

    res = sum_series(SeriesSpec(terms(), lambda z: sr_weight_ratio_bound(p, z),
                                tolerance=tol, max_terms=max_terms,
                                envelope=lambda z: pref * weights[z]))
    out = np.clip(res.value, 0.0, 1.0)
    return out[()] if np.ndim(out) == 0 else out


def sample_sr_power(p: SRFadingParams, rng: np.random.Generator, size=None):
    """Draw ``|A + Z|**2`` with A**2 ~ Gamma(m, omega/m) and Z complex normal, variance b0 per axis."""
    a = np.sqrt(rng.gamma(p.m, p.omega / p.m, size))
    sd = math.sqrt(p.b0)
    x = a + sd * rng.standard_normal(size)
    y = sd * rng.standard_normal(size)
    return x * x + y * y


def sample_rayleigh_power(rng: np.random.Generator, size=None):
    """Unit-mean exponential power (Rayleigh amplitude)."""
    return rng.standard_exponential(size)
