import math

import numpy as np
import pytest

from leocov.channel import Thresholds
from leocov.coverage import SystemConfig, p_cov_gw_u, p_cov_s_gw
from leocov.geometry import ConstellationConfig, Shell, contact_cdf, visibility_mass
from leocov.montecarlo import (GW_DISC, NEAREST_OVERALL, MCConfig, empirical_contact_cdf,
                               estimate_from_batches, ks_distance, sample_contact_distances,
                               simulate_all, simulate_end_to_end, simulate_gw_u, simulate_s_gw,
                               visibility_fraction)

TWO_SHELLS = ConstellationConfig((Shell(500e3, 5), Shell(1500e3, 10)))


def test_same_seed_same_result(baseline_low):
    mc = MCConfig(trials=20_000, seed=5, batch=1_000)
    assert simulate_all(baseline_low, mc) == simulate_all(baseline_low, mc)


def test_different_seeds_differ(baseline_low):
    a = simulate_s_gw(baseline_low, MCConfig(trials=20_000, seed=1))
    b = simulate_s_gw(baseline_low, MCConfig(trials=20_000, seed=2))
    assert a.successes != b.successes


def test_batches_are_independent_of_total():
    # batch k of a longer run is the same draw as batch k of a shorter one
    cons = ConstellationConfig.single(500e3, 10)
    short = sample_contact_distances(cons, MCConfig(trials=3_000, seed=4, batch=1_000))
    long = sample_contact_distances(cons, MCConfig(trials=5_000, seed=4, batch=1_000))
    np.testing.assert_array_equal(short, long[:3_000])


def test_single_satellite_visibility():
    s = Shell(800e3, 1)
    est = visibility_fraction(ConstellationConfig((s,)), MCConfig(trials=400_000, seed=3, batch=10_000))
    assert est.contains(s.altitude / (2 * s.radius(6371e3)), k=1.5)


def test_visibility_matches_analytic_mass():
    est = visibility_fraction(TWO_SHELLS, MCConfig(trials=400_000, seed=8, batch=10_000))
    assert est.contains(visibility_mass(TWO_SHELLS), k=1.5)


def test_unreachable_threshold_never_covers():
    cfg = SystemConfig(ConstellationConfig.single(500e3, 50), thresholds=Thresholds.common(1e12))
    s, u, e = simulate_all(cfg, MCConfig(trials=10_000))
    assert s.successes == u.successes == e.successes == 0
    assert s.ci_halfwidth > 0


def test_gateway_sampling_modes_agree():
    cfg = SystemConfig(ConstellationConfig.single(500e3, 50), gw_density=1e-6)
    direct = simulate_gw_u(cfg, MCConfig(trials=200_000, seed=11, batch=10_000))
    disc = simulate_gw_u(cfg, MCConfig(trials=200_000, seed=12, batch=10_000, gw_sampling=GW_DISC))
    ana = p_cov_gw_u(cfg)
    assert direct.contains(ana, k=1.5)
    assert disc.contains(ana, k=1.5)


def test_end_to_end_close_to_product_of_marginals(baseline_low):
    s, u, e = simulate_all(baseline_low, MCConfig(trials=200_000, seed=21, batch=10_000))
    assert e.contains(s.mean * u.mean, k=1.0)
    assert simulate_end_to_end(baseline_low, MCConfig(trials=200_000, seed=21, batch=10_000)) == e


def test_s_gw_matches_analytic(baseline_low):
    est = simulate_s_gw(baseline_low, MCConfig(trials=300_000, seed=17, batch=10_000))
    assert est.contains(p_cov_s_gw(baseline_low), k=1.5)


def test_empirical_cdf_matches_contact_law():
    grid = np.linspace(400e3, 5000e3, 47)
    emp = empirical_contact_cdf(TWO_SHELLS, MCConfig(trials=500_000, seed=2, batch=10_000), grid)
    ana = contact_cdf(grid, TWO_SHELLS)
    assert np.all(np.abs(emp.cdf - ana) <= 2 * emp.ci_halfwidth + 1e-12)
    assert emp.trials == 500_000


def test_empirical_cdf_rejects_unsorted_grid():
    with pytest.raises(ValueError):
        empirical_contact_cdf(TWO_SHELLS, MCConfig(trials=10), [2.0, 1.0])


def test_contact_samples_ks():
    d = sample_contact_distances(TWO_SHELLS, MCConfig(trials=400_000, seed=9, batch=10_000))
    assert ks_distance(d, lambda x: contact_cdf(x, TWO_SHELLS), visibility_mass(TWO_SHELLS)) < 0.005


def test_association_rules():
    one = SystemConfig(ConstellationConfig.single(500e3, 20), thresholds=Thresholds.common(1e-6))
    mc = MCConfig(trials=50_000, seed=3)
    # with one shell the nearest satellite is visible exactly when any is
    assert simulate_s_gw(one, mc) == simulate_s_gw(one, MCConfig(trials=50_000, seed=3, association=NEAREST_OVERALL))
    two = one.with_(constellation=TWO_SHELLS)
    vis = simulate_s_gw(two, mc)
    overall = simulate_s_gw(two, MCConfig(trials=50_000, seed=3, association=NEAREST_OVERALL))
    assert overall.successes < vis.successes


def test_interval_coverage_rate():
    # 95% intervals should hold the true value for most of 100 independent runs
    cfg = SystemConfig(ConstellationConfig.single(500e3, 50), gw_density=1e-6)
    truth = p_cov_gw_u(cfg)
    hits = sum(simulate_gw_u(cfg, MCConfig(trials=5_000, seed=s, batch=500)).contains(truth)
               for s in range(100))
    assert hits >= 90


def test_estimate_from_batches_arithmetic():
    est = estimate_from_batches([10, 20, 30], [100, 100, 100], seed=0)
    assert est.mean == pytest.approx(0.2)
    assert est.trials_used == 300 and est.successes == 60
    p_b = np.array([0.1, 0.2, 0.3])
    se_bm = math.sqrt(np.sum((p_b - 0.2) ** 2) / 3 / 2)
    assert est.ci_halfwidth == pytest.approx(1.959963984540054 * se_bm)


def test_batch_sizes_and_validation():
    assert MCConfig(trials=2_500, batch=1_000).batch_sizes() == [1_000, 1_000, 500]
    with pytest.raises(ValueError):
        MCConfig(trials=0)
    with pytest.raises(ValueError):
        MCConfig(association="random")
    with pytest.raises(ValueError):
        MCConfig(gw_sampling="grid")


def test_ks_distance_defective_law():
    x = np.array([0.5, np.inf])
    # half the mass at 0.5, claimed law has mass 0.5 uniform on [0, 1]
    assert ks_distance(x, lambda v: 0.5 * np.clip(v, 0, 1), mass=0.5) == pytest.approx(0.25)
