import math

import pytest

from oprelay import analytics
from oprelay.harness import (SWEEP_COLUMNS, SimConfig, default_m_grid, optimize_m, run_experiment,
                             run_trial, sweep_csv, sweep_n)

NOISE_FREE_DB = 300.0


def test_noise_free_single_pair():
    h1, h2 = run_trial(SimConfig(1, 1, NOISE_FREE_DB, NOISE_FREE_DB, trials=1), 0)
    assert h1.bits_delivered == 1 and h2.bits_delivered == 1


def test_trial_is_deterministic():
    cfg = SimConfig(40, 4, master_seed=9)
    a, b = run_trial(cfg, 17), run_trial(cfg, 17)
    assert a[0].bits_delivered == b[0].bits_delivered
    assert a[1].bits_delivered == b[1].bits_delivered
    assert (a[0].sinr == b[0].sinr).all() and (a[1].links == b[1].links).all()


def test_golden_trial():
    h1, h2 = run_trial(SimConfig(100, 3, master_seed=42), 0)
    assert (h1.bits_delivered, h2.bits_delivered) == (2, 3)


def test_config_validation():
    with pytest.raises(ValueError):
        SimConfig(0, 1)
    with pytest.raises(ValueError):
        SimConfig(5, 2, trials=0)
    with pytest.raises(ValueError):
        SimConfig(2, 1, mode="threshold")
    assert SimConfig(100, 3).rho == pytest.approx(10.0)
    assert SimConfig(100, 3, mode="threshold").threshold == pytest.approx(3.07799056)


def test_hop2_mean_matches_closed_form():
    rec = run_experiment(SimConfig(100, 3, trials=10_000, master_seed=1))
    assert abs(rec.r2_mean - analytics.r2_closed_form(100, 3, 10.0)) <= max(3 * rec.r2_stderr, 1e-9)
    assert rec.r2_closed == pytest.approx(analytics.r2_closed_form(100, 3, 10.0))


def test_hop1_mean_above_lower_bound():
    rec = run_experiment(SimConfig(200, 4, trials=10_000, master_seed=2))
    s = analytics.default_threshold(200)
    assert rec.r1_mean >= analytics.r1_lower_bound(200, 4, 10.0, s) - 3 * rec.r1_stderr
    assert rec.r1_lower_half == pytest.approx(analytics.r1_lower_bound(200, 4, 10.0, s) / 2)


@pytest.mark.parametrize("mode", ["argmax", "threshold"])
def test_threshold_mode_also_clears_bound(mode):
    rec = run_experiment(SimConfig(100, 3, trials=3000, mode=mode, master_seed=3))
    assert rec.r1_mean >= 2 * rec.r1_lower_half - 3 * rec.r1_stderr


def test_record_aggregation_rules():
    rec = run_experiment(SimConfig(30, 3, trials=500, master_seed=4))
    assert rec.r_mean == min(rec.r1_mean, rec.r2_mean) / 2
    assert rec.genie_upper_half == pytest.approx((math.log(30) / math.log(2) + 2) / 2)
    assert rec.fb_bits_hop1 == 3 * 5
    assert rec.max_qualifying_relays <= 1 and rec.hop2_uniqueness_violations == 0
    assert rec.hop2_min_sinr_ratio >= 1 and rec.hop2_min_sinr >= 1


def test_single_trial_has_no_stderr():
    rec = run_experiment(SimConfig(10, 2, trials=1))
    assert rec.r1_stderr is None and rec.r2_stderr is None


def test_workers_do_not_change_results():
    cfg = SimConfig(60, 4, trials=300, master_seed=5)
    assert run_experiment(cfg, workers=1) == run_experiment(cfg, workers=4)


def test_per_link_counting_dominates_distinct():
    a = run_experiment(SimConfig(8, 4, trials=2000, master_seed=6))
    b = run_experiment(SimConfig(8, 4, trials=2000, master_seed=6, hop1_counting="per-link"))
    assert b.r1_mean >= a.r1_mean


def test_default_grid():
    grid = default_m_grid(1000)
    assert grid[0] == 1 and grid[-1] >= math.ceil(3 * math.log(1000))
    assert round(analytics.optimal_m_phase2(1000, 10)) in grid


def test_optimize_m_small_noise_free():
    m_star, rec = optimize_m(16, NOISE_FREE_DB, NOISE_FREE_DB, trials=400, seed=7)
    _, at_one = optimize_m(16, NOISE_FREE_DB, NOISE_FREE_DB, trials=400, seed=7, m_grid=[1])
    assert m_star >= 1 and rec.r_mean >= at_one.r_mean


def test_optimize_m_singleton_grid():
    m_star, rec = optimize_m(50, trials=200, m_grid=[1])
    assert m_star == 1 and rec.m == 1


def test_optimize_m_ties_go_to_smaller_m():
    # hop 1 with beta huge delivers nothing, so every m ties at r_mean = 0
    m_star, rec = optimize_m(20, beta=1e9, trials=50, m_grid=[3, 1, 2])
    assert m_star == 1 and rec.r_mean == 0


def test_optimize_m_near_hop2_predictor():
    m_star, _ = optimize_m(1000, trials=1000, seed=8, m_grid=range(1, 16))
    assert abs(m_star - round(analytics.optimal_m_phase2(1000, 10))) <= 3


def test_sweep_single_n_is_optimize_m():
    [rec] = sweep_n([40], trials=200, seed=9, m_grid=[2, 3, 4])
    _, same = optimize_m(40, trials=200, seed=9, m_grid=[2, 3, 4])
    assert rec == same
    text = sweep_csv([rec])
    header, row = text.splitlines()
    assert header.split(",") == SWEEP_COLUMNS
    assert len(row.split(",")) == len(SWEEP_COLUMNS)


def test_sweep_rejects_small_n():
    with pytest.raises(ValueError):
        sweep_n([2], trials=10)
