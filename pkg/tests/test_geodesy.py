import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from threebm.algebra import dilate_array
from threebm.errors import NonConvergenceError
from threebm.geodesy import (CotangentState, cc_distance, component_loop_upper, distance_bounds, endpoint,
                             exp_map, gauge, heisenberg_distance, linear_part)
from threebm.radial.coords import canonical_point, radial_coords, random_rotation, rotate

covectors = st.lists(st.floats(-2, 2, allow_nan=False), min_size=6, max_size=6).map(np.array)
points = st.lists(st.floats(-1.5, 1.5, allow_nan=False), min_size=6, max_size=6).map(np.array).filter(
    lambda g: gauge(g) > 1e-3)


@settings(max_examples=15)
@given(covectors)
def test_closed_form_endpoint_matches_rk4(xi):
    flow = exp_map(xi)
    assert np.allclose(endpoint(xi[:3], xi[3:]), np.asarray(flow.endpoint), atol=1e-9)
    assert flow.length == pytest.approx(np.linalg.norm(xi[:3]))


def test_rk4_refuses_coarse_steps():
    with pytest.raises(NonConvergenceError):
        exp_map(np.array([1.0, 0, 0, 0, 0, 30.0]), steps=20)


def test_hamiltonian_of_state():
    s = CotangentState(np.zeros(6), np.array([3.0, 4.0, 0, 1, 1, 1]))
    assert s.hamiltonian() == pytest.approx(12.5)


def test_linear_part_without_rotation_is_identity():
    assert np.allclose(linear_part(np.zeros(3)), np.eye(3))


def test_heisenberg_distance_limits():
    assert heisenberg_distance(2.0, 0.0) == 2.0
    assert heisenberg_distance(0.0, 1.0) == pytest.approx(math.sqrt(4 * math.pi))
    # homogeneity of the planar distance
    assert heisenberg_distance(0.6, 0.5) * 2 == pytest.approx(heisenberg_distance(1.2, 2.0), rel=1e-12)
    # continuous across the small-angle branch
    a, b = heisenberg_distance(1.0, 1e-6), heisenberg_distance(1.0, 2e-6)
    assert 1.0 < a < b < 1.0001


@settings(max_examples=30)
@given(points)
def test_bounds_ordered(g):
    b = distance_bounds(g)
    assert 0 <= b.lower <= b.upper
    assert b.upper <= component_loop_upper(g) + 1e-12


def test_exact_distances():
    assert cc_distance([0, 0, 0, 0, 0, 1.0]).d == pytest.approx(math.sqrt(4 * math.pi), rel=1e-12)
    assert cc_distance([0.3, -0.4, 1.2, 0, 0, 0]).d == pytest.approx(1.3, rel=1e-12)
    assert cc_distance(np.zeros(6)).d == 0.0


@settings(max_examples=6)
@given(points, st.sampled_from([0.5, 3.0]), st.integers(0, 100))
def test_homogeneity_and_rotation(g, lam, seed):
    d = cc_distance(g)
    U = random_rotation(np.random.default_rng(seed))
    assert cc_distance(dilate_array(lam, g[None])[0]).d == pytest.approx(lam * d.d, rel=1e-9)
    assert cc_distance(rotate(U, g)).d == pytest.approx(d.d, rel=1e-9)


@settings(max_examples=6)
@given(points)
def test_shooting_solution_reaches_target(g):
    r = cc_distance(g)
    assert r.status in ("ok", "bounds")
    if r.status == "ok":
        lam = gauge(g)
        target = np.asarray(canonical_point(radial_coords(np.concatenate([g[:3] / lam, g[3:] / lam ** 2]))))
        flow = exp_map(np.asarray(r.covector))
        assert np.allclose(np.asarray(flow.endpoint), target, atol=1e-8)
        assert r.lower - 1e-9 * r.upper <= r.shot <= r.upper + 1e-9 * r.upper


def test_horizontal_segment_lower_bound_is_sharp():
    b = distance_bounds([1.0, 2.0, 2.0, 0, 0, 0])
    assert b.lower == pytest.approx(3.0) and b.upper == pytest.approx(3.0)


def test_invalid_restarts():
    with pytest.raises(ValueError):
        cc_distance([1, 0, 0, 0, 0, 1], restarts=0)
