import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from threebm.algebra import dilate_array, inverse
from threebm.errors import NonConvergenceError, UnderflowError
from threebm.kernel import (RAW_MASS, QuadratureSpec, constants_W, grad_p_t_batch, heat_residual_batch,
                            horiz_grad_log_pt, normalization, p1_raw, p1_raw_batch, p_t, p_t_batch, peak)
from threebm.kernel.heat import horizontal_from_euclidean
from threebm.kernel.io import read_csv, scan, write_csv
from threebm.radial.coords import random_rotation, rotate

P1_ORIGIN = (2 * math.pi) ** -7.5 * 4 * math.pi ** 5
moderate = st.lists(st.floats(-1.5, 1.5, allow_nan=False), min_size=6, max_size=6).map(np.array)


def test_spec_round_trip_and_validation():
    s = QuadratureSpec(60.0, 200, 64)
    assert QuadratureSpec.from_json(s.to_json()) == s
    with pytest.raises(ValueError):
        QuadratureSpec(scheme="cubic")
    with pytest.raises(ValueError):
        QuadratureSpec(nodes_per_axis=1)


def test_coarse_spec_fails_gate():
    with pytest.raises(NonConvergenceError) as exc:
        p1_raw_batch(np.zeros((1, 6)), QuadratureSpec(80.0, 12, 6))
    assert exc.value.diagnostic["max_change"] > 1e-9


def test_raw_origin_value():
    assert p1_raw(np.zeros(3), np.zeros(3)).value == pytest.approx(P1_ORIGIN, rel=1e-10)


def test_tensor_scheme_cross_check():
    pts = np.array([[0.3, -0.2, 0.5, 0.4, 0.1, -0.3], [1.0, 0.0, 0.0, 0.0, 1.0, 0.0]])
    a, _ = p1_raw_batch(pts)
    b, leak = p1_raw_batch(pts, QuadratureSpec(40.0, 128, scheme="tensor", tolerance=1e-7))
    assert np.allclose(a, b, rtol=1e-6)
    assert np.all(np.abs(leak) < 1e-12 * P1_ORIGIN)


def test_W_constants():
    W1, W2 = constants_W()
    assert W1 == pytest.approx(8 * math.pi ** 5, rel=1e-9)
    assert W2 == pytest.approx(64 * math.pi ** 5, rel=1e-9)


@settings(max_examples=15)
@given(moderate, st.integers(0, 1000))
def test_symmetries(g, seed):
    U = random_rotation(np.random.default_rng(seed))
    v = p_t_batch(1.0, np.array([g, rotate(U, g), np.array(inverse(g), dtype=float)]))
    assert np.allclose(v[1:], v[0], rtol=1e-9, atol=1e-12 * peak(1.0))


@settings(max_examples=15)
@given(moderate, st.sampled_from([0.5, 2.0, 3.0]))
def test_scaling_law(g, lam):
    a = p_t(lam * lam, dilate_array(lam, g[None])[0])
    b = lam ** -9 * p_t(1.0, g)
    assert a == pytest.approx(b, rel=1e-9, abs=1e-15 * peak(1.0) * lam ** -9)


def test_peak_is_maximum_and_positive():
    rng = np.random.default_rng(2)
    v = p_t_batch(1.0, rng.normal(size=(30, 6)))
    assert np.all(v > 0) and np.all(v < peak(1.0))
    assert p_t(1.0, np.zeros(6)) == pytest.approx(peak(1.0), rel=1e-10)


def test_heat_residual_and_negative_control():
    g = np.array([[0.5, -0.3, 0.2, 0.4, 0.1, -0.6], [1.2, 0.0, 0.4, 0.0, 0.8, 0.1]])
    assert np.all(heat_residual_batch(1.0, g) < 1e-4)
    # a wrong homogeneous dimension breaks the equation by O(1)
    assert np.all(heat_residual_batch(1.0, g, dim=8) > 1e-2)


def test_gradient_matches_differences():
    g = np.array([0.4, -0.5, 0.3, 0.2, -0.1, 0.5])
    v, gr = grad_p_t_batch(1.0, g[None])
    h = 1e-5
    fd = [(p_t(1.0, g + h * e) - p_t(1.0, g - h * e)) / (2 * h) for e in np.eye(6)]
    assert np.allclose(gr[0], fd, rtol=1e-5, atol=1e-9 * v[0])


def test_horizontal_conversion():
    pts = np.array([[1.0, 2.0, 3.0, 0, 0, 0]])
    grad = np.array([[0, 0, 0, 1.0, 0, 0]])
    # X_2 = d_2 - x3/2 dhat_1 + ..., so X_2 y1 = -3/2
    assert np.allclose(horizontal_from_euclidean(pts, grad)[0], [0, -1.5, 1.0])


def test_log_gradient_vanishes_at_identity():
    Xl, mag = horiz_grad_log_pt(1.0, np.zeros(6))
    assert mag < 1e-10


def test_far_points_refused_for_log_derivatives():
    with pytest.raises(UnderflowError):
        horiz_grad_log_pt(0.1, np.array([0, 0, 0, 0, 0, 40.0]))


def test_scan_csv_round_trip(tmp_path):
    rows = scan([1.0], np.array([[0.1, 0.2, 0.3, 0.4, 0.5, 0.6]]), residuals=False)
    path = tmp_path / "scan.csv"
    write_csv(rows, path)
    back = read_csv(path)
    assert back[0]["p"] == rows[0]["p"]
    assert math.isnan(back[0]["residual"])


def test_normalization_small_budget():
    a = normalization(mc_budget=1500, seed=5)
    assert a.mass.covers(RAW_MASS, z=4.0)
    assert a.mean_z.covers(0.0, z=4.0)


@settings(max_examples=10)
@given(moderate, st.sampled_from([0.5, 2.0]), st.sampled_from([0.25, 1.0, 4.0]))
def test_scaling_law_across_routes(g, lam, t):
    from threebm.kernel import p_t_direct_batch
    a = p_t_direct_batch(lam * lam * t, dilate_array(lam, g[None] * math.sqrt(t)))[0]
    b = lam ** -9 * p_t(t, g * math.sqrt(t))
    assert a == pytest.approx(b, rel=1e-8, abs=1e-14 * peak(t) * lam ** -9)
