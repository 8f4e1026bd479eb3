"""Certified series summation and adaptive quadrature.

Both routines return small result records carrying the error certificate
alongside the value so callers can propagate it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

import numpy as np
from scipy import integrate as _integrate


class NonConvergenceError(RuntimeError):
    """A series could not be certified within ``max_terms`` terms."""

    def __init__(self, message: str, partial: float, tail_bound: float, n_terms: int):
        super().__init__(message)
        self.partial = partial
        self.tail_bound = tail_bound
        self.n_terms = n_terms


class ToleranceNotMetError(RuntimeError):
    """Quadrature finished without reaching the requested tolerance."""

    def __init__(self, message: str, estimate: float, error: float):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


@dataclass
class SeriesSpec:
    """A non-negative series with a geometric tail certificate.

    ``terms`` yields term values in order (floats or equally shaped arrays).
    ``ratio_bound(z)`` must bound ``e[k+1] / e[k]`` for every ``k >= z``, where
    ``e`` is the envelope sequence (``envelope(z) >= term[z]``; the terms
    themselves when no envelope is given). Once the ratio is below one the
    tail after term ``z`` is at most ``e[z] * r / (1 - r)``.
    """

    terms: Iterable
    ratio_bound: Callable[[int], float]
    tolerance: float = 1e-10
    max_terms: int = 10_000
    envelope: Optional[Callable[[int], float]] = None

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.max_terms < 1:
            raise ValueError("max_terms must be >= 1")


@dataclass
class SeriesResult:
    value: float | np.ndarray
    n_terms: int
    tail_bound: float


def sum_series(spec: SeriesSpec) -> SeriesResult:
    """Sum terms until the certified tail drops below ``spec.tolerance``.

    Terms are accumulated left to right in generation order, so the same
    spec always gives a bit-identical result. Array-valued terms are summed
    elementwise and certified on their largest entry.
    """
    total = 0.0
    tail = math.inf
    n = 0
    for z, term in enumerate(spec.terms):
        if z >= spec.max_terms:
            break
        total = total + term
        n = z + 1
        r = spec.ratio_bound(z)
        if r < 1.0:
            if spec.envelope is not None:
                e = spec.envelope(z)
            else:
                e = float(np.max(term)) if np.ndim(term) else float(term)
            tail = e * r / (1.0 - r)
            if tail < spec.tolerance:
                return SeriesResult(total, n, tail)
    raise NonConvergenceError(
        f"series not certified after {n} terms (tail bound {tail:.3g}, "
        f"tolerance {spec.tolerance:.3g})",
        partial=total, tail_bound=tail, n_terms=n,
    )


@dataclass
class QuadratureSpec:
    """Integrand over ``[lower, upper]`` split at sorted interior breakpoints.

    With ``sqrt_left`` every piece ``[p, q]`` is integrated in ``u`` where
    ``x = p + u**2``, which removes inverse-square-root singularities sitting
    on a piece's left end. With ``vector`` the integrand returns a 1-D array
    and tolerances apply to the Euclidean norm of the error vector.
    """

    integrand: Callable[[float], float]
    lower: float
    upper: float
    breakpoints: Sequence[float] = field(default_factory=tuple)
    abs_tol: float = 1e-12
    rel_tol: float = 1e-8
    sqrt_left: bool = False
    vector: bool = False
    limit: int = 200

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("tolerances must be positive")
        bp = list(self.breakpoints)
        if bp != sorted(bp):
            raise ValueError("breakpoints must be sorted")
        if self.upper < self.lower:
            raise ValueError("upper < lower")

    def pieces(self) -> list[tuple[float, float]]:
        edges = [self.lower]
        edges += [b for b in self.breakpoints if self.lower < b < self.upper]
        edges.append(self.upper)
        return [(p, q) for p, q in zip(edges[:-1], edges[1:]) if q > p]


@dataclass
class QuadratureResult:
    value: float | np.ndarray
    error: float


def integrate(spec: QuadratureSpec) -> QuadratureResult:
    """Adaptive Gauss-Kronrod integration piece by piece.

    Scalar integrands go through QUADPACK, vector integrands through
    ``scipy.integrate.quad_vec``. Raises :class:`ToleranceNotMetError` when
    the combined error estimate exceeds ``max(abs_tol, rel_tol * |value|)``
    by more than a factor of ten; both estimators are conservative so small
    overruns are accepted.
    """
    value = 0.0
    error = 0.0
    pieces = spec.pieces()
    n = max(len(pieces), 1)
    for p, q in pieces:
        if spec.sqrt_left:
            f = spec.integrand

            def g(u, p=p, f=f):
                return 2.0 * u * f(p + u * u)

            a, b = 0.0, math.sqrt(q - p)
        else:
            g, a, b = spec.integrand, p, q
        if spec.vector:
            v, e = _integrate.quad_vec(
                g, a, b, epsabs=spec.abs_tol / n, epsrel=spec.rel_tol,
                norm="2", limit=spec.limit,
            )
        else:
            v, e, *_ = _integrate.quad(
                g, a, b, epsabs=spec.abs_tol / n, epsrel=spec.rel_tol,
                limit=spec.limit, full_output=1,
            )
        value = value + v
        error += e
    size = float(np.linalg.norm(value)) if spec.vector else abs(value)
    target = max(spec.abs_tol, spec.rel_tol * size)
    if error > 10.0 * target:
        raise ToleranceNotMetError(
            f"quadrature error {error:.3g} exceeds tolerance {target:.3g}",
            estimate=value, error=error,
        )
    return QuadratureResult(value, error)
