import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from threebm.algebra import MultiPoly, gamma
from threebm.checks import random_radial_poly
from threebm.errors import FitFailure
from threebm.radial import RADIAL_NAMES, lift_radial, radial_coords_array
from threebm.sampler import SimConfig, simulate
from threebm.verify import (INDETERMINATE, SATISFIED, VIOLATED, RadialBump, VerifyReport, classify,
                            driver_melcher_ratio, harnack_fit, li_yau_scan, radial_inequality_gaps,
                            reverse_poincare_gap, semigroup_apply)
from threebm.verify.kernel_audits import default_harnack_pairs, gauge_sphere_points
from threebm.verify.mc_audits import gammahat_array
from threebm.geodesy import gauge


@pytest.fixture(scope="module")
def batch():
    return simulate(SimConfig(t=1.0, dt=2e-3, n_paths=30_000, seed=21))


@given(st.floats(-10, 10), st.floats(0, 1))
def test_classify(margin, tol):
    s = classify(margin, tol)
    if margin >= 0:
        assert s == SATISFIED
    elif margin >= -tol:
        assert s == INDETERMINATE
    else:
        assert s == VIOLATED
    assert classify(math.nan, 1.0) == INDETERMINATE


def test_report_serialization(tmp_path):
    rep = VerifyReport("demo", {"t": [1.0]}, [{"margin": np.float64(0.5), "tol": 0.0, "status": SATISFIED},
                                              {"margin": -2.0, "tol": 1.0, "status": VIOLATED}])
    assert not rep.passed and rep.worst_margin == -2.0
    rep.dump(tmp_path / "r.json")
    back = json.loads((tmp_path / "r.json").read_text())
    assert back["counts"][VIOLATED] == 1 and back["rows"][0]["margin"] == 0.5
    rep.write_csv(tmp_path / "r.csv")
    assert (tmp_path / "r.csv").read_text().startswith("margin,tol,status")


def test_semigroup_of_linear_function_is_exact(batch):
    x1 = MultiPoly.gens()[0]
    sv = semigroup_apply(x1, 1.0, g=[0.7, 0, 0, 0, 0, 0], batch=batch, derivatives=True)
    assert abs(sv.value - 0.7) < 4 * sv.stderr
    assert np.allclose(sv.grad, [1, 0, 0], atol=1e-9)


def test_semigroup_rejects_time_mismatch(batch):
    with pytest.raises(ValueError):
        semigroup_apply(MultiPoly.constant(1), 2.0, batch=batch)


def test_semigroup_of_quadratic(batch):
    # P_t r1 = r1 + 6t at any base point
    x1, x2, x3 = MultiPoly.gens()[:3]
    sv = semigroup_apply(x1 * x1 + x2 * x2 + x3 * x3, 1.0, g=[1, 0, 0, 0, 0, 0], batch=batch, derivatives=True)
    assert abs(sv.value - 7.0) < 4 * sv.stderr
    assert abs(sv.grad[0] - 2.0) < 4 * sv.grad_stderr[0] + 1e-6


@given(st.integers(0, 1000))
def test_gammahat_array_matches_exact_gamma(seed):
    rng = np.random.default_rng(seed)
    f = random_radial_poly(rng)
    g = rng.normal(size=(4, 6))
    r = radial_coords_array(g)
    dF = np.stack([f.diff(k).evaluate_array(r) for k in range(3)], axis=1)
    assert np.allclose(gammahat_array(r, dF), gamma(lift_radial(f)).evaluate_array(g), rtol=1e-9, atol=1e-9)


def test_bump_gradient_by_differences():
    from threebm.radial import radial_gens
    r1, r2, z = radial_gens()
    F = RadialBump(r1 + z, 2.0, 1.0)
    r = np.array([[1.0, 2.0, 0.5]])
    h = 1e-6
    fd = [(F.value(r + h * e) - F.value(r - h * e))[0] / (2 * h) for e in np.eye(3)]
    assert np.allclose(F.grad(r)[0], fd, rtol=1e-6, atol=1e-9)
    # support inside the gauge ball of radius 2
    assert F(np.array([[3.0, 0, 0, 0, 0, 0]]))[0] == 1.0


def test_driver_melcher_linear(batch):
    rep = driver_melcher_ratio(t=1.0, batch=batch)
    rows = {r["f"]: r for r in rep.rows}
    for name in ("x1", "x1+2x2-x3"):
        assert abs(rows[name]["ratio"] - 1) <= 3 * rows[name]["stderr"] + 1e-12
    assert rep.constants["C_emp"] >= 1 - 1e-9


def test_reverse_poincare(batch):
    rep = reverse_poincare_gap(t=1.0, batch=batch)
    row = next(r for r in rep.rows if r["f"] == "x1")
    assert abs(row["gap"] - 2.0) <= 3 * row["stderr"]
    assert rep.passed


def test_radial_inequalities(batch):
    rep = radial_inequality_gaps(t=1.0, batch=batch)
    assert rep.passed, rep.violations
    with pytest.raises(ValueError):
        # negative everywhere, so the entropy term is undefined
        radial_inequality_gaps(RadialBump(MultiPoly.constant(1, RADIAL_NAMES), 2.0, offset=-1.0), t=1.0,
                               batch=batch)


def test_gauge_sphere_points():
    pts = gauge_sphere_points(10, seed=1)
    assert np.allclose([gauge(p) for p in pts], 1.0)


def test_harnack_small():
    rep = harnack_fit([(0.5, 1.0), (1.0, 2.0)], default_harnack_pairs(3, seed=2), restarts=32)
    assert rep.passed
    assert rep.constants["A1"] >= 4.5 - 1e-6
    assert rep.diagnostics["origin_slice_A1"] == pytest.approx(4.5, abs=1e-6)


def test_harnack_infeasible_data_raises(monkeypatch):
    import threebm.verify.kernel_audits as ka
    monkeypatch.setattr(ka, "_min_constants", lambda *a, **k: None)
    with pytest.raises(FitFailure):
        ka.harnack_fit([(0.5, 1.0)], default_harnack_pairs(1, seed=0), restarts=16)


def test_li_yau_small():
    rep = li_yau_scan((0.5, 1.0), n_points=5)
    assert rep.diagnostics["n_feasible"] > 0
    assert rep.diagnostics["origin_slice_C3"] == pytest.approx(4.5, abs=1e-5)
    assert rep.diagnostics["C3_min_feasible"] >= 4.5


def test_li_yau_empty_grid_raises():
    with pytest.raises(FitFailure):
        li_yau_scan((1.0,), n_points=3, constants_grid=np.array([[1.0, 1.0, 0.5]]))
