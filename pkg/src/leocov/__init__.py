"""Coverage of LEO satellite systems relayed through ground gateways.

Satellites are independent uniform points on concentric shells, gateways a
planar Poisson process; coverage is evaluated analytically and by snapshot
Monte-Carlo simulation, and compared with a distant terrestrial base station.
"""
__version__ = "0.1.0"

from .channel import LinkBudget, SRFadingParams, Thresholds, link_constant, sr_cdf, sr_ccdf
from .coverage import (CoverageReport, SystemConfig, crossover_abs_distance, crossover_gw_density,
                       p_cov_abs, p_cov_end_to_end, p_cov_gw_u, p_cov_s_gw)
from .geometry import (ConstellationConfig, DistributionVariant, Shell, contact_cdf, contact_pdf,
                       horizon_distance, shell_ccdf, visibility_mass)
from .montecarlo import MCConfig, MCEstimate, simulate_all, simulate_end_to_end, simulate_gw_u, simulate_s_gw

__all__ = [
    "LinkBudget", "SRFadingParams", "Thresholds", "link_constant", "sr_cdf", "sr_ccdf",
    "CoverageReport", "SystemConfig", "crossover_abs_distance", "crossover_gw_density",
    "p_cov_abs", "p_cov_end_to_end", "p_cov_gw_u", "p_cov_s_gw",
    "ConstellationConfig", "DistributionVariant", "Shell", "contact_cdf", "contact_pdf",
    "horizon_distance", "shell_ccdf", "visibility_mass",
    "MCConfig", "MCEstimate", "simulate_all", "simulate_end_to_end", "simulate_gw_u", "simulate_s_gw",
]
