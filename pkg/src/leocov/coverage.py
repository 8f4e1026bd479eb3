"""Analytic coverage probabilities for the satellite-gateway-user chain.

The S-GW coverage is ``P(W_s**2 / D**2 >= c)``. Writing ``Y = D**2``,

    P = int F_bar(c y) f_Y(y) dy,    f_Y(y) = f_D(sqrt(y)) / (2 sqrt(y))

and expanding the fading law as a gamma mixture turns this into a weighted
sum of incomplete-gamma integrals. The default evaluator integrates the
upper-gamma tail of every mixture component at once (a vector integrand) and
sums them directly, which keeps relative precision when coverage is tiny.
``method="complement"`` takes visibility mass minus the lower-gamma terms and
``method="integrand"`` keeps the series inside the integrand; both serve as
cross-checks.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
from scipy import optimize, special

from .channel import (LinkBudget, SRFadingParams, Thresholds, link_constant,
                      sr_ccdf, sr_weight_ratio_bound, sr_weights)
from .geometry import (ConstellationConfig, DistributionVariant, contact_pdf,
                       horizon_distance, visibility_mass)
from .numerics import QuadratureSpec, SeriesSpec, integrate, sum_series

SERIES_TOL = 1e-10
QUAD_REL_TOL = 1e-8
QUAD_ABS_TOL = 1e-12
# exp(-pi lambda r^2) below this (relative to its peak of 1) is dropped
GW_TAIL = 1e-16


class InfeasibleError(ValueError):
    """No parameter value can satisfy the requested crossover."""


@dataclass(frozen=True)
class SystemConfig:
    constellation: ConstellationConfig
    budget: LinkBudget = field(default_factory=LinkBudget)
    thresholds: Thresholds = field(default_factory=Thresholds)
    gw_density: float = 1e-5  # 1/m^2
    sr: SRFadingParams = field(default_factory=SRFadingParams)
    variant: DistributionVariant = DistributionVariant.CAP_AREA

    def __post_init__(self):
        if not self.gw_density > 0:
            raise ValueError("gateway density must be positive")
        object.__setattr__(self, "variant", DistributionVariant(self.variant))

    @property
    def link_constant(self) -> float:
        return link_constant(self.budget, self.thresholds)

    def with_(self, **changes) -> "SystemConfig":
        return replace(self, **changes)


@dataclass
class CoverageReport:
    p_s_gw: float
    p_gw_u: float
    p_end_to_end: float
    p_abs: Optional[float] = None
    method: str = "analytic"
    ci_halfwidth: Optional[dict] = None

    def as_dict(self) -> dict:
        return {
            "method": self.method,
            "p_s_gw": self.p_s_gw,
            "p_gw_u": self.p_gw_u,
            "p_end_to_end": self.p_end_to_end,
            "p_abs": self.p_abs,
            "ci_halfwidth": self.ci_halfwidth,
        }


def p_cov_gw_u(cfg: SystemConfig, rel_tol: float = QUAD_REL_TOL, abs_tol: float = QUAD_ABS_TOL) -> float:
    """Coverage of the gateway-to-user hop (nearest gateway of a planar PPP, Rayleigh fading)."""
    lam = cfg.gw_density
    lb = cfg.budget
    k = cfg.thresholds.gamma_u * lb.sigma2_u / lb.rho_g
    r_max = math.sqrt(-math.log(GW_TAIL) / (math.pi * lam))

    def f(r):
        return 2.0 * math.pi * lam * r * math.exp(-math.pi * lam * r * r - k * r ** lb.alpha)

    res = integrate(QuadratureSpec(f, 0.0, r_max, abs_tol=abs_tol, rel_tol=rel_tol))
    return min(max(res.value, 0.0), 1.0)


def _y_support(cons: ConstellationConfig):
    re = cons.earth_radius
    lo = min(s.altitude for s in cons.shells) ** 2
    hi = max(horizon_distance(s, re) for s in cons.shells) ** 2
    bps = sorted({d * d for d in cons.breakpoints()})
    return lo, hi, bps


def _density_y(cons: ConstellationConfig, variant):
    def f_y(y):
        d = math.sqrt(y)
        return float(contact_pdf(d, cons, variant)) / (2.0 * d)
    return f_y


def _fading_weights(sr: SRFadingParams, mass: float, tol: float) -> np.ndarray:
    """Mixture weights up to the point where ``mass * pref * tail(w)`` is certified below ``tol``."""
    pref = sr.prefactor
    weights = []
    for z, w in enumerate(sr_weights(sr)):
        weights.append(w)
        r = sr_weight_ratio_bound(sr, z)
        if r < 1 and pref * w * mass * r / (1 - r) < tol:
            return np.asarray(weights)
        if z > 100_000:
            raise RuntimeError("fading mixture weights do not decay")


def s_gw_coverage(c: float, cons: ConstellationConfig, sr: SRFadingParams,
                  variant=DistributionVariant.CAP_AREA, *, method: str = "terms",
                  series_tol: float = SERIES_TOL, rel_tol: float = QUAD_REL_TOL,
                  abs_tol: float = QUAD_ABS_TOL) -> float:
    """P(W_s**2 >= c D**2) for link constant ``c`` [1/m^2].

    ``method``:

    * ``"terms"`` integrates each mixture component's tail
      ``Q(z+1, c y / (2 b0))`` against f_Y and sums the weighted results;
    * ``"complement"`` is the mass-minus-lower-gamma form term by term
      (identical in exact arithmetic, loses precision when coverage is tiny);
    * ``"integrand"`` integrates ``sr_ccdf(c y) f_Y(y)`` directly.
    """
    variant = DistributionVariant(variant)
    if c < 0:
        raise ValueError("link constant must be non-negative")
    mass = visibility_mass(cons, variant)
    if c == 0:
        return mass
    lo, hi, bps = _y_support(cons)
    f_y = _density_y(cons, variant)
    # arc-angle densities blow up like 1/sqrt at each a_i; cap-area is smooth anyway
    sqrt_left = variant is DistributionVariant.ARC_ANGLE

    if method == "integrand":
        def g(y):
            return float(sr_ccdf(c * y, sr, series_tol)) * f_y(y)
        res = integrate(QuadratureSpec(g, lo, hi, bps, abs_tol=abs_tol, rel_tol=rel_tol,
                                       sqrt_left=sqrt_left))
        return min(max(res.value, 0.0), mass)
    if method not in ("terms", "complement"):
        raise ValueError(f"unknown method {method!r}")

    pref = sr.prefactor
    weights = _fading_weights(sr, mass, series_tol / 2)
    orders = np.arange(1, len(weights) + 1, dtype=float)
    scale = c / (2.0 * sr.b0)
    gamma_fn = special.gammaincc if method == "terms" else special.gammainc

    def g_vec(y):
        return pref * weights * gamma_fn(orders, scale * y) * f_y(y)

    res = integrate(QuadratureSpec(
        g_vec, lo, hi, bps, abs_tol=series_tol / 2, rel_tol=rel_tol,
        sqrt_left=sqrt_left, vector=True, limit=10_000,
    ))
    term_integrals = np.maximum(res.value, 0.0)
    n = len(weights)
    if method == "terms":
        # every integral is at most the mass, so the weights envelope the terms
        series = sum_series(SeriesSpec(iter(term_integrals),
                                       lambda z: sr_weight_ratio_bound(sr, z),
                                       tolerance=series_tol, max_terms=n,
                                       envelope=lambda z: pref * weights[z] * mass))
        value = float(series.value)
    else:
        series = sum_series(SeriesSpec(iter(term_integrals),
                                       lambda z: sr_weight_ratio_bound(sr, z),
                                       tolerance=series_tol, max_terms=n))
        value = mass - float(series.value)
    return min(max(value, 0.0), mass)


def p_cov_s_gw(cfg: SystemConfig, **kw) -> float:
    """Coverage of the satellite-to-gateway hop (nearest visible satellite, SR fading)."""
    return s_gw_coverage(cfg.link_constant, cfg.constellation, cfg.sr, cfg.variant, **kw)


def p_cov_abs(R: float, budget: LinkBudget, th: Thresholds) -> float:
    """Coverage from a lone terrestrial base station at distance ``R`` (Rayleigh fading)."""
    if R < 0:
        raise ValueError("distance must be non-negative")
    return math.exp(-th.gamma_u * R ** budget.alpha * budget.sigma2_u / budget.rho_a)


def p_cov_end_to_end(cfg: SystemConfig, abs_distance: Optional[float] = None, **kw) -> CoverageReport:
    s = p_cov_s_gw(cfg, **kw)
    u = p_cov_gw_u(cfg)
    p_abs = None if abs_distance is None else p_cov_abs(abs_distance, cfg.budget, cfg.thresholds)
    return CoverageReport(s, u, s * u, p_abs)


def crossover_abs_distance(cfg: SystemConfig, p_end_to_end: Optional[float] = None) -> float:
    """Distance beyond which the satellite chain beats the base station.

    ``p_cov_abs`` is ``exp(-k R**alpha)``, so the crossing is inverted in
    closed form rather than searched for.
    """
    if p_end_to_end is None:
        p_end_to_end = p_cov_end_to_end(cfg).p_end_to_end
    if not 0 < p_end_to_end <= 1:
        raise InfeasibleError(f"no crossover for end-to-end coverage {p_end_to_end!r}")
    if p_end_to_end == 1:
        return 0.0
    lb, th = cfg.budget, cfg.thresholds
    k = th.gamma_u * lb.sigma2_u / lb.rho_a
    return (-math.log(p_end_to_end) / k) ** (1.0 / lb.alpha)


def crossover_gw_density(cfg: SystemConfig, R_abs: float, floor: float = 1e-12,
                         ceiling: float = 1.0, rtol: float = 1e-9) -> float:
    """Smallest gateway density whose end-to-end coverage reaches the base station's.

    Root-finds in ``log(density)`` using that GW-U coverage increases with
    density; the S-GW factor does not depend on it.
    """
    target_total = p_cov_abs(R_abs, cfg.budget, cfg.thresholds)
    s = p_cov_s_gw(cfg)
    if s <= target_total:
        raise InfeasibleError(
            f"satellite hop coverage {s:.4g} cannot exceed base-station coverage {target_total:.4g}")
    target = target_total / s

    def gap(log_lam):
        return p_cov_gw_u(cfg.with_(gw_density=math.exp(log_lam))) - target

    lo, hi = math.log(floor), math.log(ceiling)
    if gap(lo) >= 0:
        return floor
    if gap(hi) < 0:
        raise InfeasibleError(f"density ceiling {ceiling:g} /m^2 is not enough")
    root = optimize.brentq(gap, lo, hi, xtol=rtol, rtol=rtol)
    lam = math.exp(root)
    while gap(math.log(lam)) < 0:
        lam *= 1.0 + rtol
    return lam
