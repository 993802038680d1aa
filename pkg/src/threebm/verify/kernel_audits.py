"""Audits that only need the kernel: gradient bound, Harnack and Li-Yau type.

All three are homogeneous under ``(t, g) -> (lam^2 t, delta_lam g)``. Grids
are therefore laid out on the unit gauge sphere and pushed to each time by
``delta_sqrt(t)``, which makes the scale-invariance diagnostic a direct
comparison across ``t``.
"""
from __future__ import annotations

import math
from typing import Sequence

import numpy as np
from scipy import optimize

from ..algebra.group import dilate_array, inverse, multiply
from ..errors import FitFailure
from ..geodesy import cc_distance, gauge
from ..kernel.direct import horiz_grad_log_direct
from ..kernel.heat import below_resolution, horiz_grad_log_pt_batch, p_t_batch
from ..kernel.quadrature import QuadratureSpec
from .report import INDETERMINATE, VerifyReport, classify

GAUGE_TIMES = (0.25, 1.0, 4.0)
SCALE_TOL = 1e-3


def gauge_sphere_points(n: int, seed: int = 0) -> np.ndarray:
    """``n`` random points with ``(|x|^4 + |y|^2)^(1/4) = 1``."""
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((n, 6))
    out = np.empty_like(g)
    for k, row in enumerate(g):
        out[k] = dilate_array(1.0 / gauge(row), row)
    return out


def distances(points: np.ndarray, restarts: int = 64, seed: int = 0) -> list:
    return [cc_distance(p, restarts=restarts, seed=seed) for p in points]


def _spread(values: np.ndarray) -> float:
    """Largest relative deviation of the columns from the first one."""
    ref = values[:, :1]
    with np.errstate(invalid="ignore", divide="ignore"):
        rel = np.abs(values / ref - 1)
    rel = np.where(np.abs(ref) > 0, rel, np.abs(values - ref))
    return float(np.nanmax(rel)) if rel.size else 0.0


# gradient bound ----------------------------------------------------------

def gradient_ratio_scan(t_list: Sequence[float] = GAUGE_TIMES, grid: np.ndarray | None = None,
                        spec: QuadratureSpec | None = None, n_points: int = 50, dilations: Sequence[float] = (0.5, 1.0, 2.0),
                        exclude: float = 0.05, restarts: int = 64, seed: int = 0,
                        cross_check: bool = True) -> VerifyReport:
    """``t sqrt(Gamma(log p_t))(g) / d(g)`` on gauge-sphere points.

    For every ``t`` the grid is ``delta_{lam sqrt t}`` of the gauge points,
    one copy per entry of ``dilations``. Points with ``d < exclude sqrt(t)``
    are excluded from the ratio; the intermediate form
    ``t sqrt(Gamma) / (d + sqrt t)`` is kept everywhere. The identity is
    always added as a row. ``C_emp`` is the largest ratio.

    The main route builds ``p_t`` from ``p_1`` by exact scaling, so its
    ratios agree across ``t`` by construction. With ``cross_check`` the
    ratios are recomputed from the direct-time kernel with difference
    gradients, and ``direct_spread`` compares those, at every ``t``, with
    the main route at the first ``t``.
    """
    base = gauge_sphere_points(n_points, seed) if grid is None else np.asarray(grid, dtype=float)
    dist = distances(base, restarts, seed)
    d0 = np.array([r.d for r in dist])
    rows, excluded = [], []
    table, direct = {}, {}
    for lam in dilations:
        for t in t_list:
            s = lam * math.sqrt(t)
            pts = np.vstack([np.zeros(6), dilate_array(s, base)])
            d = np.concatenate([[0.0], s * d0])
            vals = p_t_batch(t, pts, spec)
            bad = below_resolution(t, vals)
            ok = ~bad
            mag = np.full(len(pts), np.nan)
            mag_direct = np.full(len(pts), np.nan)
            if ok.any():
                mag[ok] = horiz_grad_log_pt_batch(t, pts[ok], spec)[1]
                if cross_check:
                    mag_direct[ok] = horiz_grad_log_direct(t, pts[ok])
            for k in range(len(pts)):
                if bad[k]:
                    excluded.append({"t": t, "dilation": lam, "index": k - 1, "reason": "kernel underflow"})
                    continue
                ratio = t * mag[k] / d[k] if d[k] >= exclude * math.sqrt(t) else math.nan
                inter = t * mag[k] / (d[k] + math.sqrt(t))
                rows.append({"t": t, "dilation": lam, "index": k - 1, "d": d[k], "grad_log": mag[k],
                             "ratio": ratio, "intermediate": inter, "margin": 0.0 if math.isfinite(inter) else -1.0,
                             "tol": 0.0, "status": "satisfied" if math.isfinite(inter) else INDETERMINATE})
                table[(lam, t, k)] = ratio
                if cross_check and d[k] >= exclude * math.sqrt(t):
                    direct[(lam, t, k)] = t * mag_direct[k] / d[k]
    ratios = np.array([r["ratio"] for r in rows if math.isfinite(r["ratio"])])
    inter = np.array([r["intermediate"] for r in rows])
    # scale invariance: for fixed dilation and point the ratio must not depend on t
    keys = sorted({(lam, k) for lam, _, k in table if k > 0})
    cols = []
    for lam, k in keys:
        v = [table.get((lam, t, k), math.nan) for t in t_list]
        if all(math.isfinite(x) for x in v):
            cols.append(v)
    spread = _spread(np.array(cols)) if cols else math.nan
    direct_spread = 0.0
    for (lam, t, k), v in direct.items():
        ref = table.get((lam, t_list[0], k), math.nan)
        direct_spread = max(direct_spread, abs(v / ref - 1) if math.isfinite(ref) and ref > 0 else math.inf)
    origin = [r["grad_log"] for r in rows if r["index"] == -1]
    diag = {
        "scale_spread": spread, "direct_spread": direct_spread if cross_check else math.nan,
        "scale_tol": SCALE_TOL,
        "all_finite": bool(len(ratios) > 0 and np.all(np.isfinite(ratios)) and np.all(np.isfinite(inter))),
        "origin_grad_log_max": float(max(origin)) if origin else math.nan,
        "distance_status": sorted({r.status for r in dist}),
    }
    diag["pass"] = bool(diag["all_finite"] and spread <= SCALE_TOL and (not cross_check or direct_spread <= SCALE_TOL))
    return VerifyReport(
        "gradient-bound",
        {"t": list(t_list), "n_points": len(base), "dilations": list(dilations), "seed": seed, "exclude": exclude},
        rows,
        {"C_emp": float(ratios.max()) if len(ratios) else math.nan,
         "C_intermediate_emp": float(np.nanmax(inter)) if len(inter) else math.nan},
        {"scale": SCALE_TOL, "distance_solve": 1e-10},
        excluded, diag)


# Harnack -----------------------------------------------------------------

HARNACK_TIMES = (0.25, 0.5, 1.0, 2.0)
LOG_TOL = 1e-7


def default_harnack_pairs(n_pairs: int = 12, seed: int = 0) -> list:
    """The origin pair, ``n_pairs`` random pairs in the unit gauge ball and
    as many repeated points."""
    rng = np.random.default_rng(seed)
    sphere = gauge_sphere_points(2 * n_pairs, seed + 1)
    radii = rng.uniform(0.0, 1.0, size=2 * n_pairs)
    pts = np.array([dilate_array(max(r, 1e-3), p) for r, p in zip(radii, sphere)])
    pairs = [(np.zeros(6), np.zeros(6))]
    pairs += [(pts[2 * k], pts[2 * k + 1]) for k in range(n_pairs)]
    pairs += [(pts[2 * k], pts[2 * k]) for k in range(n_pairs)]
    return pairs


def _pair_distance(g1, g2, restarts: int, seed: int) -> float:
    if np.array_equal(g1, g2):
        return 0.0
    return cc_distance(np.asarray(multiply(inverse(g1), g2), dtype=float), restarts=restarts, seed=seed).d


def _min_constants(a: np.ndarray, b: np.ndarray, lhs: np.ndarray, objective) -> np.ndarray | None:
    """Least ``objective . (A1, A2)`` with ``lhs <= A1 a + A2 b + tol``, ``A >= 0``."""
    res = optimize.linprog(objective, A_ub=-np.stack([a, b], axis=1), b_ub=-(lhs - LOG_TOL),
                           bounds=[(0, None), (0, None)], method="highs")
    return res.x if res.status == 0 else None


def harnack_fit(t_pairs: Sequence[tuple[float, float]] | None = None, g_pairs: Sequence | None = None,
                spec: QuadratureSpec | None = None, restarts: int = 64, seed: int = 0) -> VerifyReport:
    """Smallest ``(A1, A2)`` with
    ``log p_t1(g1) - log p_t2(g2) <= A1 log(t2/t1) + A2 d^2(g1, g2) / (t2 - t1)``.

    The fit is a linear program minimizing ``A1 + A2``. The minimal ``A1`` on
    the slice ``g1 = g2 = 0`` is reported separately.

    Raises
    ------
    FitFailure
        If no nonnegative constants satisfy the data.
    """
    if t_pairs is None:
        t_pairs = [(a, b) for i, a in enumerate(HARNACK_TIMES) for b in HARNACK_TIMES[i + 1:]]
    for t1, t2 in t_pairs:
        if not 0 < t1 < t2:
            raise ValueError("need 0 < t1 < t2")
    g_pairs = default_harnack_pairs(seed=seed) if g_pairs is None else g_pairs
    d = np.array([_pair_distance(np.asarray(a, float), np.asarray(b, float), restarts, seed) for a, b in g_pairs])
    times = sorted({t for pair in t_pairs for t in pair})
    pts = np.array([p for pair in g_pairs for p in pair], dtype=float)
    vals = {t: p_t_batch(t, pts, spec).reshape(len(g_pairs), 2) for t in times}
    rows, excluded = [], []
    a, b, lhs, origin = [], [], [], []
    for t1, t2 in t_pairs:
        for k, (g1, g2) in enumerate(g_pairs):
            p1v, p2v = vals[t1][k, 0], vals[t2][k, 1]
            if below_resolution(t1, np.array([p1v]))[0] or below_resolution(t2, np.array([p2v]))[0]:
                excluded.append({"t1": t1, "t2": t2, "pair": k, "reason": "kernel underflow"})
                continue
            a.append(math.log(t2 / t1))
            b.append(d[k] ** 2 / (t2 - t1))
            lhs.append(math.log(p1v) - math.log(p2v))
            origin.append(not np.any(g1) and not np.any(g2))
            rows.append({"t1": t1, "t2": t2, "pair": k, "d": d[k], "log_ratio": lhs[-1]})
    a, b, lhs, origin = map(np.asarray, (a, b, lhs, origin))
    x = _min_constants(a, b, lhs, [1.0, 1.0])
    if x is None:
        raise FitFailure("no nonnegative (A1, A2) satisfies the Harnack data")
    A1, A2 = float(x[0]), float(x[1])
    a1_only = _min_constants(a, b, lhs, [1.0, 0.0])
    origin_A1 = float(np.max(lhs[origin] / a[origin])) if origin.any() else math.nan
    for r, ai, bi, li in zip(rows, a, b, lhs):
        r["rhs"] = A1 * ai + A2 * bi
        r["margin"] = r["rhs"] - li
        r["tol"] = LOG_TOL
        r["status"] = classify(r["margin"], LOG_TOL)
    margins = np.array([r["margin"] for r in rows])
    hist, edges = np.histogram(margins, bins=10)
    diag = {"origin_slice_A1": origin_A1, "margin_histogram": {"counts": hist.tolist(), "edges": edges.tolist()},
            "feasible": True}
    # the fit may undercut the slice value by the constraint slack
    diag["pass"] = bool(A1 >= origin_A1 - LOG_TOL / float(a.min()) - 1e-12)
    return VerifyReport(
        "harnack", {"t_pairs": [list(p) for p in t_pairs], "n_pairs": len(g_pairs), "seed": seed}, rows,
        {"A1": A1, "A2": A2, "A1_min_any_A2": float(a1_only[0]) if a1_only is not None else math.nan},
        {"log": LOG_TOL}, excluded, diag)


# Li-Yau type -------------------------------------------------------------

LI_YAU_TIMES = (0.5, 1.0, 2.0)


def default_constants_grid() -> np.ndarray:
    c1 = np.round(np.arange(0.05, 1.0001, 0.05), 4)
    c2 = np.array([0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0])
    c3 = np.array([1.0, 2.0, 4.0, 4.5, 5.0, 6.0, 8.0, 10.0, 15.0, 20.0, 30.0, 50.0])
    return np.array(np.meshgrid(c1, c2, c3, indexing="ij")).reshape(3, -1).T


def li_yau_fields(t: float, pts: np.ndarray, spec: QuadratureSpec | None = None, rel_dt: float = 1e-4):
    """``d_t log p_t``, ``Gamma(log p_t)`` and ``sum (Y_i log p_t)^2`` at each row."""
    dt = rel_dt * t
    up = np.log(p_t_batch(t + dt, pts, spec))
    dn = np.log(p_t_batch(t - dt, pts, spec))
    _, mag, Yl = horiz_grad_log_pt_batch(t, pts, spec)
    return (up - dn) / (2 * dt), mag ** 2, (Yl ** 2).sum(1)


def li_yau_scan(t_list: Sequence[float] = LI_YAU_TIMES, grid: np.ndarray | None = None,
                constants_grid: np.ndarray | None = None, spec: QuadratureSpec | None = None,
                n_points: int = 24, seed: int = 0) -> VerifyReport:
    """Constants ``(C1, C2, C3)`` from ``constants_grid`` with
    ``d_t u >= C1 Gamma(u) + C2 t sum (Y_i u)^2 - C3 / t`` for ``u = log p_t``
    at every grid point.

    The default grid is the identity plus points of the unit gauge ball, each
    pushed to time ``t`` by ``delta_sqrt(t)``; ``t d_t u``, ``t Gamma(u)`` and
    ``t^2 sum (Y_i u)^2`` must then agree across ``t``.

    Raises
    ------
    FitFailure
        If no grid triple is feasible.
    """
    if grid is None:
        sphere = gauge_sphere_points(n_points, seed)
        radii = np.random.default_rng(seed + 7).uniform(0.1, 1.5, size=n_points)
        grid = np.vstack([np.zeros(6), [dilate_array(r, p) for r, p in zip(radii, sphere)]])
    grid = np.asarray(grid, dtype=float)
    C = default_constants_grid() if constants_grid is None else np.asarray(constants_grid, dtype=float)
    feasible = np.ones(len(C), dtype=bool)
    rows, excluded, scaled = [], [], []
    origin_c3 = []
    for t in t_list:
        pts = dilate_array(math.sqrt(t), grid)
        vals = p_t_batch(t, pts, spec)
        ok = ~below_resolution(t, vals)
        for k in np.flatnonzero(~ok):
            excluded.append({"t": t, "index": int(k), "reason": "kernel underflow"})
        ut, gam, ysq = (np.full(len(pts), np.nan) for _ in range(3))
        if ok.any():
            ut[ok], gam[ok], ysq[ok] = li_yau_fields(t, pts[ok], spec)
        scaled.append(np.stack([t * ut, t * gam, t * t * ysq], axis=1))
        for k in np.flatnonzero(ok):
            # tolerance: finite differences in t and quadrature noise
            tol = 1e-6 * (abs(ut[k]) + gam[k] + t * ysq[k] + 1.0 / t)
            rhs = C[:, 0] * gam[k] + C[:, 1] * t * ysq[k] - C[:, 2] / t
            feasible &= ut[k] - rhs >= -tol
            if not np.any(grid[k]):
                origin_c3.append(-t * ut[k])
            rows.append({"t": t, "index": int(k), "dt_log_p": ut[k], "gamma": gam[k], "vertical": ysq[k],
                         "tol": tol})
    if not feasible.any():
        raise FitFailure("no constants in the grid satisfy the Li-Yau data")
    feas = C[feasible]
    # margins at the feasible triple with the largest C1, then C2, then smallest C3
    order = np.lexsort((feas[:, 2], -feas[:, 1], -feas[:, 0]))
    best = feas[order[0]]
    for r in rows:
        r["rhs"] = best[0] * r["gamma"] + best[1] * r["t"] * r["vertical"] - best[2] / r["t"]
        r["margin"] = r["dt_log_p"] - r["rhs"]
        r["status"] = classify(r["margin"], r["tol"])
    S = np.stack(scaled, axis=2)  # (points, fields, times)
    valid = np.all(np.isfinite(S), axis=(1, 2))
    spread = 0.0
    for f in range(3):
        block = S[valid, f, :]
        big = np.abs(block[:, :1]) > 1e-8
        if big.any():
            spread = max(spread, _spread(block[big[:, 0]]))
    c3_min_feasible = float(feas[:, 2].min())
    diag = {"origin_slice_C3": float(max(origin_c3)) if origin_c3 else math.nan, "scale_spread": spread,
            "scale_tol": SCALE_TOL, "n_feasible": int(feasible.sum()), "C3_min_feasible": c3_min_feasible}
    diag["pass"] = bool(spread <= SCALE_TOL)
    return VerifyReport(
        "li-yau", {"t": list(t_list), "n_points": len(grid), "constants_grid_size": len(C), "seed": seed}, rows,
        {"feasible": feas.tolist(), "example": best.tolist(), "max_C1": float(feas[:, 0].max()),
         "max_C2": float(feas[:, 1].max())},
        {"relative": 1e-6, "scale": SCALE_TOL}, excluded, diag)
