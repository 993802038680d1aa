"""Acceptance criteria, one test per criterion at the stated tolerances.

Each test prints a ``criterion N PASS|FAIL`` line; the session summary
repeats them.
"""
import math
import time

import numpy as np
import pytest

from threebm.algebra import dilate_array, inverse
from threebm.checks import (check_brackets, check_commutant, check_curvature_gap, check_first_proof,
                            check_formal_identities, check_L_commutators, check_nonnegativity, check_radial_tables,
                            check_reduction, random_radial_poly, random_rational)
from threebm.geodesy import cc_distance, exp_map, gauge
from threebm.kernel import (RAW_MASS, QuadratureSpec, constants_W, heat_residual_batch, normalization, p1_raw,
                            p1_raw_batch, p_t_batch, p_t_direct_batch, peak)
from threebm.radial import canonical_point, gammahat2_expanded, gammahat2_sos, jet_of, radial_coords
from threebm.radial.coords import exact_radial_point, random_rotation, rotate
from threebm.sampler import SimConfig, bulk_points, dilation_distribution_check, kde_compare, moments_check, simulate
from threebm.verify import (driver_melcher_ratio, gradient_ratio_scan, harnack_fit, li_yau_scan,
                            radial_inequality_gaps, reverse_poincare_gap)
from threebm.verify.kernel_audits import LOG_TOL, gauge_sphere_points


def _report(lines):
    for line in lines:
        print("   ", line)


@pytest.fixture(scope="module")
def batch_t1():
    """t = 1, dt = 1e-3, 1e5 paths, and its simulation time; shared by criteria 7 and 10."""
    t0 = time.perf_counter()
    batch = simulate(SimConfig(t=1.0, dt=1e-3, n_paths=100_000, seed=2024))
    return batch, time.perf_counter() - t0


@pytest.mark.criterion(1, "exact algebra suite under 5 s")
def test_criterion_01_algebra():
    t0 = time.perf_counter()
    results = [check_brackets(), check_L_commutators()]
    elapsed = time.perf_counter() - t0
    _report([f"{r.name}: {r.passed} {r.detail}" for r in results] + [f"runtime {elapsed:.3f} s"])
    assert all(r.passed for r in results)
    assert elapsed < 5.0


@pytest.mark.criterion(2, "L and Gamma tables on (r1, r2, z)")
def test_criterion_02_tables():
    r = check_radial_tables()
    _report([f"{k}" for k in r.detail["checked"]])
    assert r.passed, r.detail


@pytest.mark.criterion(3, "commutant dimension 9 at degrees 2, 3, 4 under 2 min")
def test_criterion_03_commutant():
    r = check_commutant((2, 3, 4))
    _report([f"degree {k}: {v}" for k, v in r.detail.items()] + [f"runtime {r.seconds:.2f} s"])
    assert r.passed
    assert r.seconds < 120


@pytest.mark.criterion(4, "radial Gamma_2 identities, reduction, certificates, nonnegativity")
def test_criterion_04_radial():
    formal = check_formal_identities()
    # (b) as an exact value: r1 (SOS - expanded) at nondegenerate rational points
    rng = np.random.default_rng(40)
    nonzero = 0
    for _ in range(200):
        f = random_radial_poly(rng)
        while True:
            g = random_rational(rng, 6)
            p = exact_radial_point(g)
            if p.r1 > 0 and p.gram_gap > 0:
                break
        j = jet_of(f, p)
        nonzero += p.r1 * (gammahat2_sos(j, p)[0] - gammahat2_expanded(j, p)) != 0
    red = check_reduction(1000)
    first = check_first_proof(1000)
    nonneg = check_nonnegativity(10_000)
    _report([f"(a, b) {formal.detail}", f"(b) pointwise r1 (SOS - expanded) nonzero at {nonzero} of 200",
             f"(c) {red.detail}", f"(d) {first.detail}", f"(e) {nonneg.detail}"])
    assert formal.passed and nonzero == 0
    assert red.passed and first.passed and nonneg.passed


@pytest.mark.criterion(5, "curvature inequality gap on 1e4 triples")
def test_criterion_05_curvature_gap():
    r = check_curvature_gap(10_000)
    _report([str(r.detail), f"runtime {r.seconds:.1f} s"])
    assert r.passed


@pytest.mark.criterion(6, "heat kernel values, constants, normalization, residual, symmetry, scaling")
def test_criterion_06_kernel():
    t0 = time.perf_counter()
    lines, failures = [], []

    p0 = p1_raw(np.zeros(3), np.zeros(3)).value
    expected = (2 * math.pi) ** -7.5 * 4 * math.pi ** 5
    rel = abs(p0 / expected - 1)
    lines.append(f"p1_raw(0) = {p0:.12e}, closed form {expected:.12e}, rel {rel:.1e}")
    if not (p0 > 0 and rel <= 1e-6):
        failures.append("p1(0)")

    W1, W2 = constants_W()
    e1, e2 = abs(W1 / (8 * math.pi ** 5) - 1), abs(W2 / (64 * math.pi ** 5) - 1)
    lines.append(f"W1 = {W1:.10f} (rel {e1:.1e}), W2 = {W2:.9f} (rel {e2:.1e})")
    if max(e1, e2) > 1e-6:
        failures.append("W")

    audits = [normalization(mc_budget=b, seed=s) for b, s in ((2000, 101), (4000, 202))]
    lo = max(a.mass.ci()[0] for a in audits)
    hi = min(a.mass.ci()[1] for a in audits)
    for a in audits:
        lines.append(f"mass budget {a.mass.n}: {a.mass.value:.6e} +- {a.mass.stderr:.1e}, CI {a.mass.ci()}")
    lines.append(f"common interval [{lo:.6e}, {hi:.6e}], (2 pi)^-3 = {RAW_MASS:.6e}")
    if not (lo <= hi and lo <= RAW_MASS <= hi):
        failures.append("normalization")

    ref = np.array([dilate_array(r, p) for r, p in
                    zip(np.linspace(0.2, 1.5, 20), gauge_sphere_points(20, seed=66))])
    res = heat_residual_batch(1.0, ref)
    lines.append(f"heat residual max {res.max():.2e} over {len(ref)} points")
    if not res.max() < 1e-3:
        failures.append("heat residual")

    # radial symmetry on the Cartesian scheme, which has no built-in rotation invariance
    tensor = QuadratureSpec(50.0, 160, scheme="tensor", tolerance=1e-7)
    rng = np.random.default_rng(67)
    raw = rng.normal(size=(10, 6)) * 0.6
    rotated = np.array([rotate(random_rotation(rng), g) for g in raw])
    inverted = np.array([np.asarray(inverse(g), dtype=float) for g in raw])
    a = p1_raw_batch(raw, tensor)[0]
    sym = max(np.max(np.abs(p1_raw_batch(rotated, tensor)[0] / a - 1)),
              np.max(np.abs(p1_raw_batch(inverted, tensor)[0] / a - 1)))
    lines.append(f"rotation and inversion symmetry, max rel {sym:.1e}")
    if not sym <= 1e-6:
        failures.append("symmetry")

    # scaling law across two quadrature routes
    scal = 0.0
    pts = rng.normal(size=(10, 6)) * 0.7
    for lam in (0.5, 2.0, 3.0):
        for t in (0.5, 1.0):
            lhs = p_t_direct_batch(lam * lam * t, dilate_array(lam, pts))
            rhs = lam ** -9 * p_t_batch(t, pts)
            scal = max(scal, float(np.max(np.abs(lhs / rhs - 1))))
    lines.append(f"scaling law p_(lam^2 t)(delta_lam g) = lam^-9 p_t(g), max rel {scal:.1e}")
    if not scal <= 1e-5:
        failures.append("scaling")

    elapsed = time.perf_counter() - t0
    lines.append(f"runtime {elapsed:.1f} s")
    _report(lines)
    assert not failures, failures
    assert elapsed < 600


@pytest.mark.criterion(7, "sampler moments at 1e5 paths and dilation check at lambda 1/2 and 2")
def test_criterion_07_sampler(batch_t1):
    batch, sim_seconds = batch_t1
    t0 = time.perf_counter()
    m = moments_check(batch)
    cfg = batch.config
    dil = [dilation_distribution_check(cfg, lam) for lam in (0.5, 2.0)]
    elapsed = time.perf_counter() - t0 + sim_seconds
    lines = [f"{k}: mean {r['mean']:.5f} target {r['target']} z {r['z']:+.2f}" for k, r in m["rows"].items()
             if k in ("r1", "r2", "z")]
    for d in dil:
        zs = ", ".join(f"{k} {r['z']:+.2f}" for k, r in d["rows"].items())
        lines.append(f"lambda {d['lambda']}: {zs}; E r1 ratio {d['ratio_r1']:.4f}, E r2 ratio {d['ratio_r2']:.4f}")
    lines.append(f"runtime {elapsed:.1f} s")
    _report(lines)
    assert all(m["rows"][k]["pass"] for k in ("r1", "r2", "z"))
    assert all(d["pass"] for d in dil)
    assert elapsed < 120


@pytest.mark.criterion(8, "kernel vs sampler density within 5% at 10 bulk points, 1e6 paths")
def test_criterion_08_cross_engine():
    batch = simulate(SimConfig(t=1.0, dt=1e-3, n_paths=1_000_000, seed=11))
    pts = bulk_points(1.0, 10, seed=3)
    res = kde_compare(batch, pts)
    _report([f"p/p(0) {r['kernel'] / (2 * math.pi ** 2 * peak(1.0)):.3f}  rel {r['rel_discrepancy']:+.4f} "
             f"CI [{r['ci_rel'][0]:+.4f}, {r['ci_rel'][1]:+.4f}] count {r['count']}" for r in res["rows"]]
            + [f"max |rel| {res['max_abs_rel']:.4f}, sparse {res['n_sparse']}"])
    assert res["n_sparse"] == 0
    assert res["max_abs_rel"] <= 0.05


@pytest.mark.criterion(9, "distance: horizontal, vertical, homogeneity, rotation, 100-point sandwich")
def test_criterion_09_distance():
    lines, failures = [], []
    rng = np.random.default_rng(90)
    for x in ([1.0, 0, 0], [0.3, -1.2, 0.4], [2.0, 2.0, 1.0]):
        d = cc_distance([*x, 0, 0, 0]).d
        err = abs(d - np.linalg.norm(x))
        lines.append(f"d(x, 0) for x = {x}: error {err:.1e}")
        if err > 1e-6:
            failures.append("horizontal")
    for h in (0.25, 1.0, 4.0):
        d = cc_distance([0, 0, 0, 0, 0, h]).d
        err = abs(d - math.sqrt(4 * math.pi * h))
        lines.append(f"d(0, (0, 0, {h})): error {err:.1e}")
        if err > 1e-3:
            failures.append("vertical")
    worst_h = worst_r = 0.0
    for g in rng.normal(size=(4, 6)):
        d = cc_distance(g).d
        for lam in (0.5, 2.0):
            worst_h = max(worst_h, abs(cc_distance(dilate_array(lam, g[None])[0]).d - lam * d))
        worst_r = max(worst_r, abs(cc_distance(rotate(random_rotation(rng), g)).d - d))
    lines.append(f"homogeneity error {worst_h:.1e}, rotation error {worst_r:.1e}")
    if max(worst_h, worst_r) > 1e-6:
        failures.append("invariance")

    grid = np.array([dilate_array(r, p) for r, p in
                     zip(rng.uniform(0.1, 3.0, 100), gauge_sphere_points(100, seed=91))])
    violations, statuses, reach = 0, {}, 0.0
    for k, g in enumerate(grid):
        r = cc_distance(g)
        statuses[r.status] = statuses.get(r.status, 0) + 1
        value = r.shot if r.shot is not None else r.d
        slack = 1e-9 * r.upper
        violations += r.status == "degraded" or not (r.lower - slack <= value <= r.upper + slack)
        if r.status == "ok" and k % 10 == 0:
            # the covector, integrated by RK4, must land on the target
            lam = gauge(g)
            target = np.asarray(canonical_point(radial_coords(np.concatenate([g[:3] / lam, g[3:] / lam ** 2]))))
            reach = max(reach, float(np.max(np.abs(np.asarray(exp_map(np.asarray(r.covector)).endpoint) - target))))
    lines.append(f"sandwich: {violations} violations on {len(grid)} points, statuses {statuses}, "
                 f"RK4 endpoint error {reach:.1e}")
    if violations or reach > 1e-8:
        failures.append("sandwich")
    _report(lines)
    assert not failures, failures


@pytest.mark.criterion(10, "inequality audits: gradient, Harnack, Li-Yau, Driver-Melcher, reverse Poincare, radial")
def test_criterion_10_audits(batch_t1):
    batch_t1, _ = batch_t1
    lines, failures = [], []

    grad = gradient_ratio_scan((0.25, 1.0, 4.0), n_points=50)
    dg = grad.diagnostics
    lines.append(f"gradient: C_emp {grad.constants['C_emp']:.4f}, finite {dg['all_finite']}, "
                 f"cross-route dilation spread {dg['direct_spread']:.1e}")
    if not (grad.passed and dg["direct_spread"] <= 1e-3):
        failures.append("gradient")

    har = harnack_fit()
    A1, origin = har.constants["A1"], har.diagnostics["origin_slice_A1"]
    # each fitted constraint may be short by LOG_TOL, i.e. A1 by LOG_TOL / log(t2/t1)
    slack = LOG_TOL / min(math.log(b / a) for a, b in har.grid["t_pairs"])
    lines.append(f"harnack: A1 {A1:.8f}, A2 {har.constants['A2']:.4f}, origin slice {origin:.8f}")
    if not (har.passed and A1 >= 4.5 - slack and abs(origin - 4.5) <= 1e-6):
        failures.append("harnack")

    ly = li_yau_scan()
    d = ly.diagnostics
    lines.append(f"li-yau: {d['n_feasible']} feasible triples, C3 min {d['C3_min_feasible']}, "
                 f"origin slice C3 {d['origin_slice_C3']:.8f}, scale spread {d['scale_spread']:.1e}")
    if not (ly.passed and d["n_feasible"] > 0 and d["C3_min_feasible"] >= 4.5
            and abs(d["origin_slice_C3"] - 4.5) <= 1e-5):
        failures.append("li-yau")

    dm = driver_melcher_ratio(t=1.0, batch=batch_t1)
    for r in dm.rows:
        if r["f"] in ("x1", "x1+2x2-x3"):
            lines.append(f"driver-melcher {r['f']}: ratio {r['ratio']:.6f} +- {r['stderr']:.1e}")
            if not abs(r["ratio"] - 1) <= 3 * r["stderr"] + 1e-12:
                failures.append("driver-melcher")

    rp = reverse_poincare_gap(t=1.0, batch=batch_t1)
    row = next(r for r in rp.rows if r["f"] == "x1")
    lines.append(f"reverse poincare x1: gap {row['gap']:.4f} +- {row['stderr']:.4f} (2t = 2)")
    if not abs(row["gap"] - 2.0) <= 3 * row["stderr"]:
        failures.append("reverse poincare")

    for g in (np.zeros(6), np.array([0.5, -0.3, 0.2, 0.1, 0.4, -0.2])):
        rad = radial_inequality_gaps(t=1.0, g=g, batch=batch_t1)
        worst = min(r["gap"] / r["stderr"] if r["stderr"] > 0 else math.inf for r in rad.rows)
        lines.append(f"radial family at g = {g.tolist()}: {rad.counts()}, worst gap/stderr {worst:+.2f}")
        if rad.violations:
            failures.append("radial")
    _report(lines)
    assert not failures, failures
