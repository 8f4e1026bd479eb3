"""Spherical-shell constellation geometry and contact-distance laws.

All lengths are in meters. A ground point sits at radius ``re``; a satellite
on shell ``i`` sits at radius ``r_i = re + a_i``. With ``cos(theta)`` the
cosine of the central angle between them,

    d**2 = re**2 + r_i**2 - 2 * re * r_i * cos(theta)

and the satellite is above the horizon iff ``cos(theta) >= re / r_i``,
i.e. ``d <= sqrt(2 re a_i + a_i**2)``.

Two per-shell contact laws are provided:

* ``CAP_AREA``: the fraction of the shell inside a ball of radius ``d``,
  ``(d**2 - a_i**2) / (4 re r_i)``. This is what independent uniform
  placement produces and what the Monte-Carlo simulator reproduces.
* ``ARC_ANGLE``: the central angle fraction ``arccos(cos(theta)) / pi``.

Multi-shell products are accumulated over shells sorted by
``(altitude, count)`` so results do not depend on the order shells were
listed in.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

EARTH_RADIUS_M = 6_371_000.0
_CLAMP_TOL = 1e-12


class GeometryError(ValueError):
    """Inconsistent geometry (e.g. an arccos argument far outside [-1, 1])."""


class DistributionVariant(str, enum.Enum):
    ARC_ANGLE = "arc-angle"
    CAP_AREA = "cap-area"


@dataclass(frozen=True)
class Shell:
    altitude: float  # m
    count: int

    def __post_init__(self):
        if not self.altitude > 0:
            raise ValueError(f"shell altitude must be positive, got {self.altitude!r}")
        if int(self.count) != self.count or self.count < 1:
            raise ValueError(f"shell count must be a positive integer, got {self.count!r}")

    def radius(self, re: float) -> float:
        return re + self.altitude


@dataclass(frozen=True)
class ConstellationConfig:
    shells: tuple[Shell, ...]
    earth_radius: float = EARTH_RADIUS_M

    def __post_init__(self):
        object.__setattr__(self, "shells", tuple(self.shells))
        if not self.earth_radius > 0:
            raise ValueError("earth radius must be positive")
        if not self.shells:
            raise ValueError("constellation needs at least one shell")

    @classmethod
    def single(cls, altitude: float, count: int, earth_radius: float = EARTH_RADIUS_M):
        return cls((Shell(altitude, count),), earth_radius)

    def canonical_shells(self) -> tuple[Shell, ...]:
        return tuple(sorted(self.shells, key=lambda s: (s.altitude, s.count)))

    @property
    def max_horizon(self) -> float:
        return max(horizon_distance(s, self.earth_radius) for s in self.shells)

    @property
    def min_altitude(self) -> float:
        return min(s.altitude for s in self.shells)

    def breakpoints(self) -> list[float]:
        """Sorted distances where the contact law changes branch."""
        pts = set()
        for s in self.shells:
            pts.add(s.altitude)
            pts.add(horizon_distance(s, self.earth_radius))
        return sorted(pts)


def horizon_distance(shell: Shell, re: float) -> float:
    """Largest distance from a surface point to a visible satellite on ``shell``."""
    if not re > 0:
        raise ValueError("earth radius must be positive")
    a = shell.altitude
    return math.sqrt(2.0 * re * a + a * a)


def _clamp_unit(x):
    x = np.asarray(x, dtype=float)
    if np.any((x < -1.0 - _CLAMP_TOL) | (x > 1.0 + _CLAMP_TOL)):
        raise GeometryError("arccos argument outside [-1, 1]")
    return np.clip(x, -1.0, 1.0)


def _inside_fraction(d2, a, re, r, variant):
    """Probability one satellite lies within distance sqrt(d2), on the visible branch."""
    if variant is DistributionVariant.CAP_AREA:
        return (d2 - a * a) / (4.0 * re * r)
    return np.arccos(_clamp_unit(1.0 - (d2 - a * a) / (2.0 * re * r))) / math.pi


def beyond_horizon_ccdf(shell: Shell, re: float, variant: DistributionVariant) -> float:
    """Probability that no satellite of ``shell`` is visible."""
    r = shell.radius(re)
    if variant is DistributionVariant.CAP_AREA:
        frac = shell.altitude / (2.0 * r)
    else:
        frac = math.acos(re / r) / math.pi
    return (1.0 - frac) ** shell.count


def shell_ccdf(d, shell: Shell, re: float, variant=DistributionVariant.CAP_AREA):
    """P(nearest visible satellite of ``shell`` is at distance >= d).

    Accepts scalars or arrays; returns the same shape.
    """
    variant = DistributionVariant(variant)
    d = np.asarray(d, dtype=float)
    if np.any(d < 0):
        raise ValueError("distance must be non-negative")
    a = shell.altitude
    r = shell.radius(re)
    d_max = horizon_distance(shell, re)
    dc = np.clip(d, a, d_max)
    frac = _inside_fraction(dc * dc, a, re, r, variant)
    out = (1.0 - frac) ** shell.count
    out = np.where(d < a, 1.0, out)
    out = np.where(d > d_max, beyond_horizon_ccdf(shell, re, variant), out)
    return out[()] if out.ndim == 0 else out


def shell_pdf(d, shell: Shell, re: float, variant=DistributionVariant.CAP_AREA):
    """Density of the nearest visible satellite distance on one shell.

    Zero outside ``[a_i, d_max]``; at ``d = a_i`` the arc-angle density is
    infinite (integrable ``1/sqrt`` singularity) and reported as ``inf``.
    """
    variant = DistributionVariant(variant)
    d = np.asarray(d, dtype=float)
    a = shell.altitude
    r = shell.radius(re)
    n = shell.count
    d_max = horizon_distance(shell, re)
    inside = (d >= a) & (d <= d_max)
    dc = np.clip(d, a, d_max)
    d2 = dc * dc
    frac = _inside_fraction(d2, a, re, r, variant)
    base = (1.0 - frac) ** (n - 1)
    if variant is DistributionVariant.CAP_AREA:
        dens = n * dc / (2.0 * re * r) * base
    else:
        cos_t = _clamp_unit(1.0 - (d2 - a * a) / (2.0 * re * r))
        sin_t = np.sqrt(1.0 - cos_t * cos_t)
        with np.errstate(divide="ignore"):
            dens = n * dc / (math.pi * re * r) * base / sin_t
    out = np.where(inside, dens, 0.0)
    return out[()] if out.ndim == 0 else out


def contact_cdf(d, cfg: ConstellationConfig, variant=DistributionVariant.CAP_AREA):
    """P(D < d) for the nearest visible satellite over all shells (possibly defective)."""
    prod = 1.0
    for s in cfg.canonical_shells():
        prod = prod * shell_ccdf(d, s, cfg.earth_radius, variant)
    return 1.0 - prod


def contact_pdf(d, cfg: ConstellationConfig, variant=DistributionVariant.CAP_AREA):
    """Density of D: sum over shells of f_i * prod_{j != i} ccdf_j.

    This equals the ratio form ``prod(ccdf) * sum(f_i / ccdf_i)`` without
    dividing; a vanishing ccdf simply zeroes its products.
    """
    shells = cfg.canonical_shells()
    re = cfg.earth_radius
    ccdfs = [shell_ccdf(d, s, re, variant) for s in shells]
    total = 0.0
    for i, s in enumerate(shells):
        term = shell_pdf(d, s, re, variant)
        for j, c in enumerate(ccdfs):
            if j != i:
                term = term * c
        total = total + term
    return total


def visibility_mass(cfg: ConstellationConfig, variant=DistributionVariant.CAP_AREA) -> float:
    """P(at least one satellite above the horizon) = contact_cdf at infinity."""
    variant = DistributionVariant(variant)
    prod = 1.0
    for s in cfg.canonical_shells():
        prod *= beyond_horizon_ccdf(s, cfg.earth_radius, variant)
    return 1.0 - prod


def sample_satellites(shell: Shell, re: float, rng: np.random.Generator, size: int) -> np.ndarray:
    """Draw ``size`` satellite positions uniformly on the shell sphere.

    Returns an ``(size, 3)`` array in an Earth-centred frame. The polar
    coordinate ``z / r`` is uniform on [-1, 1] (Archimedes' hat-box theorem).
    """
    r = shell.radius(re)
    u = rng.uniform(-1.0, 1.0, size)
    phi = rng.uniform(0.0, 2.0 * math.pi, size)
    rho = r * np.sqrt(1.0 - u * u)
    return np.column_stack((rho * np.cos(phi), rho * np.sin(phi), r * u))


def surface_distance(positions: np.ndarray, re: float, ref: Sequence[float] = (0.0, 0.0, 1.0)) -> np.ndarray:
    """Euclidean distance from the surface point ``re * ref`` to each position."""
    ref = np.asarray(ref, dtype=float)
    ref = re * ref / np.linalg.norm(ref)
    return np.linalg.norm(np.asarray(positions) - ref, axis=-1)
