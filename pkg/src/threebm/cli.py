"""Command-line entry point: ``threebm <group> <command> [options]``.

Every run writes ``<group>-<command>.json`` (the result) and
``<group>-<command>.manifest.json`` (resolved options, versions, seed and
timings) into ``--out``. Passing a manifest back through ``--config``
replays the run.

Exit codes: 0 success, 1 an identity or inequality failed, 2 usage error,
3 numerical non-convergence.
"""
from __future__ import annotations

import argparse
import json
import math
import platform
import sys
import time
from dataclasses import asdict
from importlib import metadata
from pathlib import Path

import numpy as np

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, np.ndarray):
        return _jsonable(v.tolist())
    if isinstance(v, (np.floating, np.integer, np.bool_)):
        return v.item()
    if hasattr(v, "to_json"):
        return _jsonable(v.to_json())
    return v


def _versions() -> dict:
    out = {"python": platform.python_version()}
    for pkg in ("threebm", "numpy", "scipy"):
        try:
            out[pkg] = metadata.version(pkg)
        except metadata.PackageNotFoundError:
            out[pkg] = None
    return out


# argument helpers --------------------------------------------------------

def _point(values) -> np.ndarray:
    if values is None:
        raise UsageError("--point needs six numbers")
    if len(values) != 6:
        raise UsageError("--point needs six numbers (x1 x2 x3 y1 y2 y3)")
    return np.asarray(values, dtype=float)


def _grid(args) -> np.ndarray | None:
    """Points from ``--grid`` (CSV or .npy with six columns) or ``None``."""
    if not getattr(args, "grid", None):
        return None
    path = Path(args.grid)
    if not path.exists():
        raise UsageError(f"grid file not found: {path}")
    if path.suffix == ".npy":
        g = np.load(path)
    else:
        g = np.loadtxt(path, delimiter=",", ndmin=2, comments="#")
    if g.ndim != 2 or g.shape[1] != 6:
        raise UsageError("grid must have six columns")
    return g


def _spec(args):
    from .kernel.quadrature import QuadratureSpec
    return QuadratureSpec(truncation_radius=args.radius, nodes_per_axis=args.nodes, angular_nodes=args.angular,
                          scheme=args.scheme)


def _sim_config(args, t: float | None = None):
    from .sampler import SimConfig
    return SimConfig(t=args.t[0] if t is None else t, dt=args.dt, n_paths=args.paths, seed=args.seed)


def _random_grid(n: int, seed: int) -> np.ndarray:
    """Gauge-sphere points pushed to random gauge radii in [0.2, 1.5]."""
    from .algebra.group import dilate_array
    from .verify.kernel_audits import gauge_sphere_points
    radii = np.random.default_rng(seed + 101).uniform(0.2, 1.5, n)
    return np.array([dilate_array(r, p) for r, p in zip(radii, gauge_sphere_points(n, seed))])


# commands ----------------------------------------------------------------

def cmd_algebra_check(args):
    from .checks import algebra_suite, suite_passed
    res = algebra_suite(n_gap=args.n_gap, seed=args.seed, degrees=tuple(args.degrees))
    return {"checks": [r.to_json() for r in res]}, suite_passed(res)


def cmd_radial_check(args):
    from .checks import radial_suite, suite_passed
    res = radial_suite(n_pairs=args.pairs, n_points=args.points, seed=args.seed)
    return {"checks": [r.to_json() for r in res]}, suite_passed(res)


def cmd_kernel_eval(args):
    from .kernel.heat import grad_p_t_batch, heat_residual_batch, horiz_grad_log_pt_batch
    g = _point(args.point)[None]
    spec = _spec(args)
    out = []
    for t in args.t:
        v, gr = grad_p_t_batch(t, g, spec)
        row = {"t": t, "g": g[0].tolist(), "p": float(v[0]), "grad": gr[0].tolist(),
               "heat_residual": float(heat_residual_batch(t, g, spec)[0])}
        try:
            Xl, mag, Yl = horiz_grad_log_pt_batch(t, g, spec)
            row.update({"X_log_p": Xl[0].tolist(), "Y_log_p": Yl[0].tolist(), "sqrt_gamma_log_p": float(mag[0])})
        except ArithmeticError as exc:
            row["log_derivatives"] = str(exc)
        out.append(row)
    return {"spec": asdict(spec), "rows": out}, True


def cmd_kernel_scan(args):
    from .kernel.io import scan, write_csv
    grid = _grid(args)
    grid = _random_grid(args.n, args.seed) if grid is None else grid
    spec = _spec(args)
    rows = scan(args.t, grid, spec, residuals=not args.no_residuals)
    csv_path = Path(args.out) / "kernel-scan.csv"
    write_csv(rows, csv_path)
    worst = max((r["residual"] for r in rows if math.isfinite(r["residual"])), default=math.nan)
    return {"spec": asdict(spec), "csv": str(csv_path), "n_rows": len(rows), "max_heat_residual": worst}, True


def cmd_kernel_audit(args):
    from .kernel.audit import normalization
    budgets = args.budget
    audits = [normalization(_spec(args), mc_budget=b, seed=args.seed + k) for k, b in enumerate(budgets)]
    lo = max(a.mass.ci()[0] for a in audits)
    hi = min(a.mass.ci()[1] for a in audits)
    return {"audits": [a.to_json() for a in audits], "common_ci": [lo, hi], "consistent": lo <= hi}, lo <= hi


def cmd_kernel_constants(args):
    from .kernel.heat import constants_W
    from .kernel.quadrature import PREFACTOR, p1_raw
    spec = _spec(args)
    W1, W2 = constants_W(spec)
    p0 = p1_raw(np.zeros(3), np.zeros(3), spec).value
    return {"W1": W1, "W2": W2, "W1_closed": 8 * math.pi ** 5, "W2_closed": 64 * math.pi ** 5,
            "p1_raw_origin": p0, "p1_raw_origin_closed": PREFACTOR * 4 * math.pi ** 5}, True


def cmd_sim_run(args):
    from .sampler import simulate
    t0 = time.perf_counter()
    batch = simulate(_sim_config(args), threads=args.threads)
    out = batch.to_json()
    out["seconds"] = time.perf_counter() - t0
    if args.dump:
        path = Path(args.out) / "sim-terminal.npy"
        np.save(path, batch.terminal)
        out["dump"] = str(path)
    return out, True


def cmd_sim_moments(args):
    from .sampler import dilation_distribution_check, moments_check, simulate
    cfg = _sim_config(args)
    res = moments_check(simulate(cfg, threads=args.threads))
    dil = [dilation_distribution_check(cfg, lam) for lam in args.lam]
    ok = res["pass"] and all(d["pass"] for d in dil)
    return {"moments": res, "dilation": dil}, ok


def cmd_sim_compare(args):
    from .sampler import bulk_points, kde_compare, simulate
    cfg = _sim_config(args)
    spec = _spec(args)
    pts = bulk_points(cfg.t, args.points, spec, seed=args.seed)
    res = kde_compare(simulate(cfg, threads=args.threads), pts, spec, bandwidth=args.bandwidth)
    ok = res["n_sparse"] == 0 and res["max_abs_rel"] <= args.max_rel
    return res, ok


def cmd_dist_eval(args):
    from .geodesy import cc_distance, distance_bounds
    g = _point(args.point)
    r = cc_distance(g, restarts=args.restarts, seed=args.seed, threads=args.threads)
    b = distance_bounds(g)
    return {"g": g.tolist(), **r.to_json(), "lower_source": b.lower_source, "upper_source": b.upper_source}, \
        r.status != "degraded"


def cmd_dist_scan(args):
    import csv
    from .geodesy import cc_distance
    grid = _grid(args)
    grid = _random_grid(args.n, args.seed) if grid is None else grid
    path = Path(args.out) / "dist-scan.csv"
    degraded = 0
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x1", "x2", "x3", "y1", "y2", "y3", "lower", "d", "upper", "status"])
        for g in grid:
            r = cc_distance(g, restarts=args.restarts, seed=args.seed, threads=args.threads)
            degraded += r.status == "degraded"
            w.writerow([repr(float(v)) for v in g] + [repr(r.lower), repr(r.d), repr(r.upper), r.status])
    return {"csv": str(path), "n": len(grid), "degraded": degraded}, degraded == 0


def _report(rep, args, name):
    rep.dump(Path(args.out) / f"verify-{name}.report.json")
    rep.write_csv(Path(args.out) / f"verify-{name}.csv")
    return rep.to_json(), rep.passed


def cmd_verify_gradient(args):
    from .verify.kernel_audits import gradient_ratio_scan
    rep = gradient_ratio_scan(args.t, _grid(args), _spec(args), n_points=args.n, restarts=args.restarts,
                              seed=args.seed)
    return _report(rep, args, "gradient")


def cmd_verify_harnack(args):
    from .verify.kernel_audits import default_harnack_pairs, harnack_fit
    ts = sorted(args.t)
    pairs = [(a, b) for i, a in enumerate(ts) for b in ts[i + 1:]]
    grid = _grid(args)
    g_pairs = default_harnack_pairs(args.n, args.seed) if grid is None else \
        [(grid[k], grid[k + 1]) for k in range(0, len(grid) - 1, 2)]
    rep = harnack_fit(pairs, g_pairs, _spec(args), restarts=args.restarts, seed=args.seed)
    return _report(rep, args, "harnack")


def cmd_verify_liyau(args):
    from .verify.kernel_audits import li_yau_scan
    rep = li_yau_scan(args.t, _grid(args), None, _spec(args), n_points=args.n, seed=args.seed)
    return _report(rep, args, "liyau")


def _batch(args, t):
    from .sampler import simulate
    return simulate(_sim_config(args, t), threads=args.threads)


def cmd_verify_dm(args):
    from .verify.mc_audits import driver_melcher_ratio
    t = args.t[0]
    rep = driver_melcher_ratio(t=t, batch=_batch(args, t))
    return _report(rep, args, "dm")


def cmd_verify_rpoincare(args):
    from .verify.mc_audits import reverse_poincare_gap
    t = args.t[0]
    rep = reverse_poincare_gap(t=t, batch=_batch(args, t))
    return _report(rep, args, "rpoincare")


def cmd_verify_radial(args):
    from .verify.mc_audits import radial_inequality_gaps
    t = args.t[0]
    g = None if args.point is None else _point(args.point)
    rep = radial_inequality_gaps(t=t, g=g, batch=_batch(args, t))
    return _report(rep, args, "radial-ineq")


# parser ------------------------------------------------------------------

def _common(p):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--config", help="JSON file of option values (a manifest replays its run)")


def _quad(p):
    p.add_argument("--radius", type=float, default=80.0, help="quadrature truncation radius")
    p.add_argument("--nodes", type=int, default=320, help="radial Gauss-Legendre nodes")
    p.add_argument("--angular", type=int, default=96, help="polar-angle nodes")
    p.add_argument("--scheme", choices=("spherical", "tensor"), default="spherical")


def _sim(p, t_default=(1.0,), dt=1e-3, paths=100_000):
    p.add_argument("--t", type=float, nargs="+", default=list(t_default))
    p.add_argument("--dt", type=float, default=dt)
    p.add_argument("--paths", type=int, default=paths)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="threebm", description="Three Brownian motions model toolkit.")
    groups = parser.add_subparsers(dest="group", required=True)

    def command(group, name, fn, help_=None):
        p = group.add_parser(name, help=help_)
        _common(p)
        p.set_defaults(func=fn)
        return p

    g = groups.add_parser("algebra").add_subparsers(dest="command", required=True)
    p = command(g, "check", cmd_algebra_check, "exact algebra identities")
    p.add_argument("--n-gap", type=int, default=10_000)
    p.add_argument("--degrees", type=int, nargs="+", default=[2, 3, 4])

    g = groups.add_parser("radial").add_subparsers(dest="command", required=True)
    p = command(g, "check", cmd_radial_check, "radial reduction and both certificates")
    p.add_argument("--pairs", type=int, default=1000)
    p.add_argument("--points", type=int, default=10_000)

    g = groups.add_parser("kernel").add_subparsers(dest="command", required=True)
    p = command(g, "eval", cmd_kernel_eval)
    _quad(p)
    p.add_argument("--point", type=float, nargs=6)
    p.add_argument("--t", type=float, nargs="+", default=[1.0])
    p = command(g, "scan", cmd_kernel_scan)
    _quad(p)
    p.add_argument("--t", type=float, nargs="+", default=[1.0])
    p.add_argument("--grid")
    p.add_argument("--n", type=int, default=20, help="random grid size when no --grid")
    p.add_argument("--no-residuals", action="store_true")
    p = command(g, "audit-normalization", cmd_kernel_audit)
    _quad(p)
    p.add_argument("--budget", type=int, nargs="+", default=[2000, 4000])
    p = command(g, "constants", cmd_kernel_constants)
    _quad(p)

    g = groups.add_parser("sim").add_subparsers(dest="command", required=True)
    p = command(g, "run", cmd_sim_run)
    _sim(p)
    p.add_argument("--dump", action="store_true", help="save terminal points as .npy")
    p = command(g, "moments", cmd_sim_moments)
    _sim(p)
    p.add_argument("--lam", type=float, nargs="+", default=[0.5, 2.0])
    p = command(g, "compare-kernel", cmd_sim_compare)
    _sim(p, paths=1_000_000)
    _quad(p)
    p.add_argument("--points", type=int, default=10)
    p.add_argument("--bandwidth", type=float, default=0.1)
    p.add_argument("--max-rel", type=float, default=0.05)

    g = groups.add_parser("dist").add_subparsers(dest="command", required=True)
    p = command(g, "eval", cmd_dist_eval)
    p.add_argument("--point", type=float, nargs=6)
    p.add_argument("--restarts", type=int, default=64)
    p = command(g, "scan", cmd_dist_scan)
    p.add_argument("--grid")
    p.add_argument("--n", type=int, default=20)
    p.add_argument("--restarts", type=int, default=64)

    g = groups.add_parser("verify").add_subparsers(dest="command", required=True)
    p = command(g, "gradient", cmd_verify_gradient)
    _quad(p)
    p.add_argument("--t", type=float, nargs="+", default=[0.25, 1.0, 4.0])
    p.add_argument("--grid")
    p.add_argument("--n", type=int, default=50)
    p.add_argument("--restarts", type=int, default=64)
    p = command(g, "harnack", cmd_verify_harnack)
    _quad(p)
    p.add_argument("--t", type=float, nargs="+", default=[0.25, 0.5, 1.0, 2.0])
    p.add_argument("--grid")
    p.add_argument("--n", type=int, default=12, help="random pairs when no --grid")
    p.add_argument("--restarts", type=int, default=64)
    p = command(g, "liyau", cmd_verify_liyau)
    _quad(p)
    p.add_argument("--t", type=float, nargs="+", default=[0.5, 1.0, 2.0])
    p.add_argument("--grid")
    p.add_argument("--n", type=int, default=24)
    for name, fn in (("dm", cmd_verify_dm), ("rpoincare", cmd_verify_rpoincare),
                     ("radial-ineq", cmd_verify_radial)):
        p = command(g, name, fn)
        _sim(p, dt=2e-3)
        if name == "radial-ineq":
            p.add_argument("--point", type=float, nargs=6)
    return parser


def _apply_config(parser, args, argv):
    """Options from ``--config``; flags given on the command line win."""
    data = json.loads(Path(args.config).read_text())
    data = data.get("config", data)
    explicit = {a.split("=")[0].lstrip("-").replace("-", "_") for a in argv if a.startswith("--")}
    for k, v in data.items():
        if k in ("group", "command", "config", "func") or k in explicit:
            continue
        if not hasattr(args, k):
            raise UsageError(f"unknown config key {k!r}")
        setattr(args, k, v)
    return args


def run(argv=None) -> int:
    from .errors import FitFailure, NonConvergenceError
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        if args.config:
            args = _apply_config(parser, args, argv)
        if args.threads < 1:
            raise UsageError("--threads must be positive")
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        t0 = time.perf_counter()
        result, ok = args.func(args)
        seconds = time.perf_counter() - t0
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"threebm: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NonConvergenceError, ArithmeticError) as exc:
        print(f"threebm: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except FitFailure as exc:
        print(f"threebm: {exc}", file=sys.stderr)
        return EXIT_FAIL
    stem = f"{args.group}-{args.command}"
    config = {k: v for k, v in vars(args).items() if k != "func"}
    manifest = {"command": [args.group, args.command], "argv": argv, "config": config, "seed": args.seed,
                "threads": args.threads, "versions": _versions(), "seconds": seconds, "pass": bool(ok)}
    (out / f"{stem}.json").write_text(json.dumps(_jsonable(result), indent=2))
    (out / f"{stem}.manifest.json").write_text(json.dumps(_jsonable(manifest), indent=2))
    summary = {"command": stem, "pass": bool(ok), "seconds": round(seconds, 3), "result": str(out / f"{stem}.json")}
    print(json.dumps(summary))
    return EXIT_OK if ok else EXIT_FAIL


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
