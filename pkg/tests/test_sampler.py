import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from threebm.algebra import multiply_array
from threebm.sampler import (BLOCK, SimConfig, bulk_points, dilation_distribution_check, kde_compare,
                             kde_half_widths, moments_check, simulate, simulate_increments, step)


def test_config_validation_and_steps():
    with pytest.raises(ValueError):
        SimConfig(t=0.0, dt=0.1, n_paths=10)
    c = SimConfig(t=1.0, dt=0.3, n_paths=10)
    assert c.steps == 3 and c.dt_effective == pytest.approx(1 / 3)


def test_same_seed_same_paths_any_thread_count():
    cfg = SimConfig(t=0.5, dt=0.05, n_paths=2 * BLOCK + 17, seed=9)
    a = simulate(cfg).terminal
    b = simulate(cfg, threads=3).terminal
    assert np.array_equal(a, b)
    assert not np.array_equal(a, simulate(cfg.with_(seed=10)).terminal)


def test_terminal_is_group_product_of_increments():
    cfg = SimConfig(t=0.2, dt=0.02, n_paths=50, seed=4)
    inc = simulate_increments(cfg)
    s = np.zeros((cfg.n_paths, 6))
    for dB in inc:
        s = step(s, dB)
    assert np.allclose(s, simulate(cfg).terminal, atol=1e-13)


@given(st.lists(st.floats(-1, 1, allow_nan=False), min_size=3, max_size=3))
def test_step_is_right_multiplication(dB):
    s = np.array([[0.3, -0.1, 0.2, 0.5, 0.0, -0.4]])
    e = np.concatenate([dB, [0, 0, 0]])[None]
    assert np.allclose(step(s, np.array([dB])), multiply_array(s, e))


def test_moments_small_run():
    res = moments_check(simulate(SimConfig(t=1.0, dt=0.002, n_paths=40_000, seed=1)))
    assert res["pass"], res["rows"]


def test_left_point_area_bias_is_exact():
    # the Ito partial sum misses the within-step areas: E r2 = 3 t^2 (1 - dt / t)
    cfg = SimConfig(t=1.0, dt=0.1, n_paths=60_000, seed=6)
    m = simulate(cfg).summary()["r2"]
    assert abs(m.z_score(3 * (1 - cfg.dt_effective))) < 4
    assert abs(m.z_score(3.0)) > 6


def test_moment_check_detects_wrong_time():
    batch = simulate(SimConfig(t=1.0, dt=0.01, n_paths=20_000, seed=2))
    wrong = type(batch)(batch.terminal, batch.config.with_(t=1.2))
    assert not moments_check(wrong)["pass"]


def test_dilation_check_small():
    res = dilation_distribution_check(SimConfig(t=0.25, dt=5e-4, n_paths=30_000, seed=3), 2.0)
    assert res["pass"] and not res["identical"]
    assert res["ratio_r1"] == pytest.approx(4, rel=0.05)
    assert res["ratio_r2"] == pytest.approx(16, rel=0.1)


def test_dilation_by_one_is_identity():
    cfg = SimConfig(t=0.3, dt=0.03, n_paths=500, seed=8)
    assert dilation_distribution_check(cfg, 1.0, fresh_seed=cfg.seed)["identical"]


def test_half_widths_scale():
    assert np.allclose(kde_half_widths(4.0) / kde_half_widths(1.0), [4, 16, 8])


@settings(max_examples=5)
@given(st.sampled_from([0.5, 1.0, 2.0]), st.integers(0, 100))
def test_bulk_points_are_bulk(t, seed):
    from threebm.kernel import p_t_batch, peak
    pts = bulk_points(t, 5, seed=seed)
    assert pts.shape == (5, 6)
    assert np.all(p_t_batch(t, pts) >= 0.1 * peak(t))


def test_kde_compare_small():
    batch = simulate(SimConfig(t=1.0, dt=0.01, n_paths=100_000, seed=5))
    res = kde_compare(batch, bulk_points(1.0, 3, seed=1), min_count=100)
    assert res["n_sparse"] == 0
    # coarse check at this size; dt bias and noise are a few percent
    assert res["max_abs_rel"] < 0.15


def test_kde_report_is_deterministic():
    batch = simulate(SimConfig(t=1.0, dt=0.05, n_paths=20_000, seed=7))
    pts = bulk_points(1.0, 2, seed=2)
    assert kde_compare(batch, pts, min_count=10) == kde_compare(batch, pts, min_count=10)
