import math

import numpy as np
import pytest

from leocov.numerics import (NonConvergenceError, QuadratureSpec, SeriesSpec, ToleranceNotMetError,
                             integrate, sum_series)


def geometric(q):
    z = 0
    while True:
        yield q ** z
        z += 1


def test_geometric_series():
    res = sum_series(SeriesSpec(geometric(0.5), lambda z: 0.5, tolerance=1e-12))
    assert res.value == pytest.approx(2.0, abs=1e-12)
    assert res.tail_bound < 1e-12


def test_weighted_geometric_series():
    def terms():
        z = 0
        while True:
            yield z * 0.9 ** z
            z += 1

    # (z+1)/z * 0.9 bounds the ratio; useless at z = 0
    res = sum_series(SeriesSpec(terms(), lambda z: math.inf if z == 0 else 0.9 * (z + 1) / z,
                                tolerance=1e-10))
    assert res.value == pytest.approx(90.0, abs=1e-9)


def test_series_is_deterministic():
    spec = lambda: SeriesSpec(geometric(0.7), lambda z: 0.7, tolerance=1e-14)
    assert sum_series(spec()).value == sum_series(spec()).value


def test_series_non_convergence():
    with pytest.raises(NonConvergenceError) as e:
        sum_series(SeriesSpec(geometric(1.0), lambda z: 1.0, tolerance=1e-6, max_terms=50))
    assert e.value.n_terms == 50


def test_series_array_terms():
    q = np.array([0.1, 0.5])

    def terms():
        z = 0
        while True:
            yield q ** z
            z += 1

    res = sum_series(SeriesSpec(terms(), lambda z: 0.5, tolerance=1e-12))
    np.testing.assert_allclose(res.value, 1 / (1 - q), atol=1e-12)


def test_integrate_exponential():
    res = integrate(QuadratureSpec(lambda x: math.exp(-x), 0.0, 50.0))
    assert res.value == pytest.approx(1.0, abs=1e-12)


def test_integrate_nearest_neighbour_density():
    lam = 1e-5
    r_max = math.sqrt(math.log(1e16) / (math.pi * lam))
    f = lambda r: 2 * math.pi * lam * r * math.exp(-math.pi * lam * r * r)
    assert integrate(QuadratureSpec(f, 0.0, r_max)).value == pytest.approx(1.0, abs=1e-12)


def test_split_support_matches_unsplit():
    f = lambda x: math.sin(x) ** 2 * math.exp(-0.1 * x)
    whole = integrate(QuadratureSpec(f, 0.0, 20.0, abs_tol=1e-12, rel_tol=1e-10)).value
    split = integrate(QuadratureSpec(f, 0.0, 20.0, (7.3,), abs_tol=1e-12, rel_tol=1e-10)).value
    assert abs(whole - split) < 2 * 1e-10 * abs(whole)


def test_tolerance_halving():
    f = lambda x: 1.0 / (1.0 + x * x)
    a = integrate(QuadratureSpec(f, 0.0, 100.0, abs_tol=1e-8, rel_tol=1e-8)).value
    b = integrate(QuadratureSpec(f, 0.0, 100.0, abs_tol=5e-9, rel_tol=5e-9)).value
    assert abs(a - b) <= 1e-8 * abs(a)
    assert a == pytest.approx(math.atan(100.0), rel=1e-8)


def test_sqrt_substitution_handles_endpoint_singularity():
    res = integrate(QuadratureSpec(lambda x: 1.0 / math.sqrt(x - 1.0), 1.0, 2.0, sqrt_left=True))
    assert res.value == pytest.approx(2.0, abs=1e-12)


def test_vector_integrand():
    res = integrate(QuadratureSpec(lambda x: np.array([x, x * x]), 0.0, 3.0, (1.0,), vector=True))
    np.testing.assert_allclose(res.value, [4.5, 9.0], rtol=1e-10)


def test_tolerance_not_met():
    # oscillation far beyond what 3 subintervals can resolve
    spec = QuadratureSpec(lambda x: math.sin(1e4 * x), 0.0, 10.0, abs_tol=1e-14, rel_tol=1e-14, limit=3)
    with pytest.raises(ToleranceNotMetError) as e:
        integrate(spec)
    assert e.value.error > 0


def test_bad_specs():
    with pytest.raises(ValueError):
        QuadratureSpec(math.exp, 0.0, 1.0, (0.7, 0.2))
    with pytest.raises(ValueError):
        SeriesSpec(iter(()), lambda z: 0.5, tolerance=0.0)
