"""Snapshot Monte-Carlo simulator for the coverage chain.

Every batch draws from its own generator seeded by
``SeedSequence(seed, spawn_key=(stream, batch_index))``. Results therefore
depend only on ``(config, seed, trials, batch)``, never on how batches are
scheduled. The S-GW and GW-U streams are fixed per link, so the end-to-end
estimate reuses exactly the trials behind the two marginal estimates.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .channel import sample_rayleigh_power, sample_sr_power
from .coverage import SystemConfig
from .geometry import ConstellationConfig

NEAREST_VISIBLE = "nearest-visible"
NEAREST_OVERALL = "nearest-overall"
GW_DIRECT = "direct"
GW_DISC = "disc"

_STREAM_S_GW = 1
_STREAM_GW_U = 2
_STREAM_CONTACT = 3
_Z95 = 1.959963984540054
# P(no gateway inside the simulated disc)
_DISC_EMPTY_PROB = 1e-12
# uniforms held in memory at once when placing satellites
_CHUNK_CELLS = 4_000_000


@dataclass(frozen=True)
class MCConfig:
    trials: int = 100_000
    seed: int = 0
    batch: int = 1_000
    association: str = NEAREST_VISIBLE
    gw_sampling: str = GW_DIRECT

    def __post_init__(self):
        if self.trials < 1 or self.batch < 1:
            raise ValueError("trials and batch must be >= 1")
        if self.association not in (NEAREST_VISIBLE, NEAREST_OVERALL):
            raise ValueError(f"unknown association {self.association!r}")
        if self.gw_sampling not in (GW_DIRECT, GW_DISC):
            raise ValueError(f"unknown gateway sampling {self.gw_sampling!r}")

    def batch_sizes(self) -> list[int]:
        full, rest = divmod(self.trials, self.batch)
        return [self.batch] * full + ([rest] if rest else [])


@dataclass(frozen=True)
class MCEstimate:
    mean: float
    ci_halfwidth: float
    trials_used: int
    seed: int
    successes: int = 0

    def contains(self, value: float, k: float = 1.0) -> bool:
        return abs(value - self.mean) <= k * self.ci_halfwidth


def batch_rng(seed: int, stream: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(stream, index))))


def estimate_from_batches(successes: Sequence[int], sizes: Sequence[int], seed: int) -> MCEstimate:
    """Mean and 95% half-width from per-batch success counts.

    The standard error is the batch-means estimate, floored by the
    Agresti-Coull binomial standard error so that runs with no (or only)
    successes still report a non-degenerate interval.
    """
    s = np.asarray(successes, dtype=float)
    n = np.asarray(sizes, dtype=float)
    total_n = n.sum()
    total_s = s.sum()
    mean = total_s / total_n
    b = len(n)
    se_bm = 0.0
    if b >= 2:
        p_b = s / n
        se_bm = math.sqrt(float(np.sum(n * n * (p_b - mean) ** 2)) / total_n ** 2 * b / (b - 1))
    p_t = (total_s + 2.0) / (total_n + 4.0)
    se_ac = math.sqrt(p_t * (1.0 - p_t) / (total_n + 4.0))
    return MCEstimate(float(mean), _Z95 * max(se_bm, se_ac), int(total_n), seed, int(total_s))


def _nearest_sq_distance(cons: ConstellationConfig, n: int, rng: np.random.Generator,
                         association: str) -> np.ndarray:
    """Squared distance to the serving satellite for ``n`` trials (``inf`` = no service).

    Places every satellite independently; only the polar cosine relative
    to the ground point matters, and it is uniform on [-1, 1].
    """
    re = cons.earth_radius
    best = np.full(n, np.inf)
    best_visible = np.zeros(n, dtype=bool)
    for shell in cons.canonical_shells():
        r = shell.radius(re)
        rows = max(1, _CHUNK_CELLS // shell.count)
        cos_max = np.empty(n)
        for lo in range(0, n, rows):
            hi = min(n, lo + rows)
            cos_max[lo:hi] = rng.uniform(-1.0, 1.0, (hi - lo, shell.count)).max(axis=1)
        d2 = re * re + r * r - 2.0 * re * r * cos_max
        visible = cos_max >= re / r
        if association == NEAREST_VISIBLE:
            best = np.minimum(best, np.where(visible, d2, np.inf))
        else:
            closer = d2 < best
            best = np.where(closer, d2, best)
            best_visible = np.where(closer, visible, best_visible)
    if association == NEAREST_OVERALL:
        best = np.where(best_visible, best, np.inf)
    return best


def _s_gw_covered(cfg: SystemConfig, n: int, rng: np.random.Generator, association: str) -> np.ndarray:
    d2 = _nearest_sq_distance(cfg.constellation, n, rng, association)
    w = sample_sr_power(cfg.sr, rng, n)
    finite = np.isfinite(d2)
    return finite & (w >= cfg.link_constant * np.where(finite, d2, 0.0))


def _nearest_gateway_distance(lam: float, n: int, rng: np.random.Generator, mode: str) -> np.ndarray:
    if mode == GW_DIRECT:
        # pi lam R^2 is unit exponential for the nearest point of a planar PPP
        return np.sqrt(rng.standard_exponential(n) / (math.pi * lam))
    radius = math.sqrt(-math.log(_DISC_EMPTY_PROB) / (math.pi * lam))
    counts = rng.poisson(math.pi * lam * radius * radius, n)
    radii = radius * np.sqrt(rng.uniform(0.0, 1.0, int(counts.sum())))
    out = np.full(n, np.inf)
    nonempty = counts > 0
    starts = np.concatenate(([0], np.cumsum(counts)[:-1]))[nonempty]
    if radii.size:
        out[nonempty] = np.minimum.reduceat(radii, starts)
    return out


def _gw_u_covered(cfg: SystemConfig, n: int, rng: np.random.Generator, mode: str) -> np.ndarray:
    lb = cfg.budget
    r = _nearest_gateway_distance(cfg.gw_density, n, rng, mode)
    w = sample_rayleigh_power(rng, n)
    with np.errstate(over="ignore"):
        need = cfg.thresholds.gamma_u * lb.sigma2_u * r ** lb.alpha / lb.rho_g
    return w >= need


def _run(mc: MCConfig, stream: int, draw: Callable[[int, np.random.Generator], np.ndarray]) -> list[np.ndarray]:
    return [draw(size, batch_rng(mc.seed, stream, i)) for i, size in enumerate(mc.batch_sizes())]


def _s_gw_batches(cfg, mc):
    return _run(mc, _STREAM_S_GW, lambda n, rng: _s_gw_covered(cfg, n, rng, mc.association))


def _gw_u_batches(cfg, mc):
    return _run(mc, _STREAM_GW_U, lambda n, rng: _gw_u_covered(cfg, n, rng, mc.gw_sampling))


def _estimate(batches: list[np.ndarray], mc: MCConfig) -> MCEstimate:
    return estimate_from_batches([int(b.sum()) for b in batches], [b.size for b in batches], mc.seed)


def simulate_s_gw(cfg: SystemConfig, mc: MCConfig) -> MCEstimate:
    """Fraction of snapshots in which the gateway's serving satellite clears the SNR threshold."""
    return _estimate(_s_gw_batches(cfg, mc), mc)


def simulate_gw_u(cfg: SystemConfig, mc: MCConfig) -> MCEstimate:
    """Fraction of snapshots in which the user's nearest gateway clears the SNR threshold."""
    return _estimate(_gw_u_batches(cfg, mc), mc)


def simulate_end_to_end(cfg: SystemConfig, mc: MCConfig) -> MCEstimate:
    return simulate_all(cfg, mc)[2]


def simulate_all(cfg: SystemConfig, mc: MCConfig) -> tuple[MCEstimate, MCEstimate, MCEstimate]:
    """S-GW, GW-U and end-to-end estimates from one shared set of trials."""
    s = _s_gw_batches(cfg, mc)
    u = _gw_u_batches(cfg, mc)
    both = [a & b for a, b in zip(s, u)]
    return _estimate(s, mc), _estimate(u, mc), _estimate(both, mc)


def sample_contact_distances(cons: ConstellationConfig, mc: MCConfig) -> np.ndarray:
    """Distances to the nearest visible satellite; ``inf`` where none is visible."""
    parts = _run(mc, _STREAM_CONTACT,
                 lambda n, rng: _nearest_sq_distance(cons, n, rng, NEAREST_VISIBLE))
    return np.sqrt(np.concatenate(parts))


@dataclass
class EmpiricalCDF:
    grid: np.ndarray
    cdf: np.ndarray
    ci_halfwidth: np.ndarray
    trials: int


def empirical_contact_cdf(cons: ConstellationConfig, mc: MCConfig, grid: Sequence[float]) -> EmpiricalCDF:
    """Empirical P(D < d) on ``grid`` with per-point 95% binomial half-widths."""
    grid = np.asarray(grid, dtype=float)
    if np.any(np.diff(grid) < 0):
        raise ValueError("grid must be sorted")
    d = np.sort(sample_contact_distances(cons, mc))
    n = d.size
    cdf = np.searchsorted(d, grid, side="left") / n
    ci = _Z95 * np.sqrt(cdf * (1.0 - cdf) / n)
    return EmpiricalCDF(grid, cdf, ci, n)


def ks_distance(samples: np.ndarray, cdf: Callable[[np.ndarray], np.ndarray], mass: float = 1.0) -> float:
    """Kolmogorov-Smirnov distance between ``samples`` and a (possibly defective) CDF.

    Non-finite samples count as mass at infinity; ``mass`` is the CDF's
    limit so the plateau after the last finite sample is compared too.
    """
    x = np.asarray(samples, dtype=float)
    n = x.size
    fin = np.sort(x[np.isfinite(x)])
    if fin.size == 0:
        return abs(mass)
    f = np.asarray(cdf(fin), dtype=float)
    i = np.arange(1, fin.size + 1)
    d_plus = np.max(i / n - f)
    d_minus = np.max(f - (i - 1) / n)
    plateau = abs(mass - fin.size / n)
    return float(max(d_plus, d_minus, plateau))


def visibility_fraction(cons: ConstellationConfig, mc: MCConfig) -> MCEstimate:
    """Fraction of snapshots with at least one satellite above the horizon."""
    parts = _run(mc, _STREAM_CONTACT,
                 lambda n, rng: np.isfinite(_nearest_sq_distance(cons, n, rng, NEAREST_VISIBLE)))
    return _estimate(parts, mc)

