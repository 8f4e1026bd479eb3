"""Analytic-versus-simulation regression grid."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

from .channel import Thresholds
from .coverage import SystemConfig, p_cov_gw_u, p_cov_s_gw
from .geometry import ConstellationConfig, DistributionVariant
from .montecarlo import MCConfig, MCEstimate, simulate_all

DEFAULT_THRESHOLDS_DB = (-10.0, 0.0, 10.0)
DEFAULT_ALTITUDES_KM = (500.0, 1000.0, 1500.0)
DEFAULT_COUNTS = (10, 50, 200)


@dataclass
class GridPoint:
    gamma_db: float
    altitude_km: float
    count: int
    analytic: tuple[float, float, float]
    mc: tuple[MCEstimate, MCEstimate, MCEstimate]
    k_sigma: float = 3.0

    @property
    def deviations(self) -> tuple[float, float, float]:
        return tuple(abs(a - m.mean) for a, m in zip(self.analytic, self.mc))

    @property
    def passed(self) -> bool:
        return all(d < self.k_sigma * m.ci_halfwidth for d, m in zip(self.deviations, self.mc))


def regression_grid(base: SystemConfig, mc: MCConfig,
                    thresholds_db: Sequence[float] = DEFAULT_THRESHOLDS_DB,
                    altitudes_km: Sequence[float] = DEFAULT_ALTITUDES_KM,
                    counts: Sequence[int] = DEFAULT_COUNTS,
                    k_sigma: float = 3.0) -> Iterable[GridPoint]:
    """Yield one comparison per (threshold, altitude, count) under the cap-area law."""
    base = replace(base, variant=DistributionVariant.CAP_AREA)
    for g, a, n in itertools.product(thresholds_db, altitudes_km, counts):
        cfg = replace(base, thresholds=Thresholds.common(10 ** (g / 10)),
                      constellation=ConstellationConfig.single(a * 1e3, n, base.constellation.earth_radius))
        s = p_cov_s_gw(cfg)
        u = p_cov_gw_u(cfg)
        yield GridPoint(g, a, n, (s, u, s * u), simulate_all(cfg, mc), k_sigma)
