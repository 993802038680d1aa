"""Monte Carlo paths of the diffusion generated by ``L``.

Increments ``dB`` have variance ``2 dt`` per component, so a batch run to
time ``t`` samples ``p_t`` for ``P_t = exp(tL)`` (the standard-Brownian
process run to time ``2t``). Each step is the group product
``s o (dB, 0)``: the vertical part picks up ``x x dB / 2`` with the
pre-step ``x``, the Ito partial sum of the three Levy areas.

Randomness: paths are grouped in fixed blocks of :data:`BLOCK` paths, each
block with its own stream spawned from ``SeedSequence(seed)``. Output is
independent of the thread count.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .algebra.group import dilate_array, multiply_array
from .radial.coords import radial_coords_array

BLOCK = 8192


@dataclass(frozen=True)
class SimConfig:
    """Heat time, step, path count and seed.

    ``t / dt`` is rounded to a whole number of steps; :attr:`steps` and
    :attr:`dt_effective` report what is actually used.
    """

    t: float
    dt: float
    n_paths: int
    seed: int = 0
    stream_rule: str = "seedsequence-block"

    def __post_init__(self):
        if self.t <= 0 or self.dt <= 0 or self.n_paths < 1:
            raise ValueError("t, dt and n_paths must be positive")

    @property
    def steps(self) -> int:
        return max(1, round(self.t / self.dt))

    @property
    def dt_effective(self) -> float:
        return self.t / self.steps

    def with_(self, **kw) -> "SimConfig":
        d = asdict(self)
        d.update(kw)
        return SimConfig(**d)


@dataclass(frozen=True)
class Moment:
    mean: float
    stderr: float

    def z_score(self, target: float) -> float:
        return (self.mean - target) / self.stderr if self.stderr > 0 else math.inf * (self.mean != target)


@dataclass(frozen=True)
class SampleBatch:
    terminal: np.ndarray
    config: SimConfig
    stats: dict = field(default_factory=dict)

    @property
    def radial(self) -> np.ndarray:
        return radial_coords_array(self.terminal)

    def moment(self, values: np.ndarray) -> Moment:
        return Moment(float(values.mean()), float(values.std(ddof=1) / math.sqrt(len(values))))

    def summary(self) -> dict:
        r = self.radial
        out = {name: self.moment(r[:, k]) for k, name in enumerate(("r1", "r2", "z"))}
        for k, name in enumerate(("x1", "x2", "x3", "y1", "y2", "y3")):
            out[name] = self.moment(self.terminal[:, k])
        return out

    def to_json(self) -> dict:
        return {"config": asdict(self.config), "steps": self.config.steps,
                "dt_effective": self.config.dt_effective,
                "moments": {k: asdict(v) for k, v in self.summary().items()}}


def step(s, dB) -> np.ndarray:
    """``s o (dB, 0)`` for arrays of shape (..., 6) and (..., 3)."""
    dB = np.asarray(dB, dtype=float)
    inc = np.concatenate([dB, np.zeros(dB.shape[:-1] + (3,))], axis=-1)
    return multiply_array(s, inc)


def _block_streams(cfg: SimConfig) -> list[np.random.SeedSequence]:
    n_blocks = -(-cfg.n_paths // BLOCK)
    return np.random.SeedSequence(cfg.seed).spawn(n_blocks)


def _run_block(ss: np.random.SeedSequence, n: int, steps: int, dt: float) -> np.ndarray:
    rng = np.random.default_rng(ss)
    sd = math.sqrt(2 * dt)
    x = np.zeros((n, 3))
    y = np.zeros((n, 3))
    for _ in range(steps):
        dB = rng.standard_normal((n, 3)) * sd
        y += 0.5 * np.cross(x, dB)
        x += dB
    return np.concatenate([x, y], axis=1)


def simulate(cfg: SimConfig, threads: int = 1) -> SampleBatch:
    """Terminal points of ``cfg.n_paths`` independent paths."""
    streams = _block_streams(cfg)
    sizes = [min(BLOCK, cfg.n_paths - k * BLOCK) for k in range(len(streams))]
    steps, dt = cfg.steps, cfg.dt_effective
    args = [(ss, n, steps, dt) for ss, n in zip(streams, sizes)]
    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            blocks = list(ex.map(lambda a: _run_block(*a), args))
    else:
        blocks = [_run_block(*a) for a in args]
    return SampleBatch(np.concatenate(blocks, axis=0), cfg)


def simulate_increments(cfg: SimConfig, block: int = 0) -> np.ndarray:
    """Per-step increments of one block, shape (steps, n, 3); for tests of the
    group structure."""
    ss = _block_streams(cfg)[block]
    n = min(BLOCK, cfg.n_paths - block * BLOCK)
    rng = np.random.default_rng(ss)
    sd = math.sqrt(2 * cfg.dt_effective)
    return np.stack([rng.standard_normal((n, 3)) * sd for _ in range(cfg.steps)])


def moments_check(batch: SampleBatch, z: float = 3.0) -> dict:
    """``E r1 = 6t``, ``E r2 = 3t^2``, ``E z = 0`` and zero means of all coordinates."""
    t = batch.config.t
    s = batch.summary()
    targets = {"r1": 6 * t, "r2": 3 * t * t, "z": 0.0}
    targets.update({k: 0.0 for k in ("x1", "x2", "x3", "y1", "y2", "y3")})
    rows = {}
    for k, target in targets.items():
        zs = s[k].z_score(target)
        rows[k] = {"mean": s[k].mean, "stderr": s[k].stderr, "target": target, "z": zs, "pass": abs(zs) <= z}
    return {"t": t, "n_paths": batch.config.n_paths, "rows": rows, "pass": all(r["pass"] for r in rows.values())}


_RADIAL_MOMENTS = {
    "r1": lambda r: r[:, 0], "r2": lambda r: r[:, 1], "z": lambda r: r[:, 2],
    "r1^2": lambda r: r[:, 0] ** 2, "r2^2": lambda r: r[:, 1] ** 2, "z^2": lambda r: r[:, 2] ** 2,
}


def dilation_distribution_check(cfg: SimConfig, lam: float, fresh_seed: int | None = None,
                                z: float = 3.0) -> dict:
    """Compare ``delta_lam`` of a batch at time ``t`` with a fresh batch at ``lam^2 t``.

    The fresh batch uses the same step ``dt`` (so a different number of
    steps) and, by default, an independent seed.
    """
    if lam <= 0:
        raise ValueError("lambda must be positive")
    base = simulate(cfg)
    pushed = radial_coords_array(dilate_array(lam, base.terminal))
    fresh_cfg = cfg.with_(t=lam * lam * cfg.t, seed=cfg.seed + 1 if fresh_seed is None else fresh_seed)
    fresh = radial_coords_array(simulate(fresh_cfg).terminal)
    rows = {}
    for name, fn in _RADIAL_MOMENTS.items():
        a, b = fn(pushed), fn(fresh)
        ma, mb = a.mean(), b.mean()
        se = math.sqrt(a.var(ddof=1) / len(a) + b.var(ddof=1) / len(b))
        zs = (ma - mb) / se if se > 0 else (0.0 if ma == mb else math.inf)
        rows[name] = {"pushed": float(ma), "fresh": float(mb), "stderr": se, "z": zs, "pass": abs(zs) <= z}
    base_r = radial_coords_array(base.terminal)
    return {
        "lambda": lam, "t": cfg.t, "t_fresh": fresh_cfg.t, "rows": rows,
        "ratio_r1": float(fresh[:, 0].mean() / base_r[:, 0].mean()),
        "ratio_r2": float(fresh[:, 1].mean() / base_r[:, 1].mean()),
        "identical": bool(np.array_equal(pushed, fresh)),
        "pass": all(r["pass"] for r in rows.values()),
    }


# kernel density comparison -----------------------------------------------

RADIAL_DENSITY_FACTOR = 2 * math.pi ** 2  # density of (r1, r2, z) is 2 pi^2 p_t(g)


def _box(center: np.ndarray, half: np.ndarray) -> np.ndarray:
    corners = np.array([[sx, sy, sz] for sx in (-1, 1) for sy in (-1, 1) for sz in (-1, 1)], dtype=float)
    return center + corners * half


def _box_inside(center: np.ndarray, half: np.ndarray) -> bool:
    # the radial domain {r1, r2 >= 0, z^2 <= r1 r2} is convex, so corners suffice
    c = _box(center, half)
    return bool(np.all(c[:, 0] > 0) and np.all(c[:, 1] > 0) and np.all(c[:, 2] ** 2 < c[:, 0] * c[:, 1]))


KDE_BANDWIDTH = 0.1


def kde_half_widths(t: float, bandwidth: float = KDE_BANDWIDTH) -> np.ndarray:
    """Box half-widths: ``bandwidth`` times the spread of ``(r1, r2, z)`` at time ``t``
    (about ``5t``, ``3t^2`` and ``1.7 t^1.5``)."""
    return bandwidth * np.array([5.0 * t, 3.0 * t * t, 1.7 * t ** 1.5])


def kde_compare(batch: SampleBatch, points, spec=None, bandwidth: float = KDE_BANDWIDTH, n_boot: int = 400,
                nodes: int = 6, min_count: int = 400, seed: int = 0) -> dict:
    """Box-kernel density estimate of the sampled ``(r1, r2, z)`` against
    ``2 pi^2 p_t`` from quadrature.

    Each point gets a box with half-widths :func:`kde_half_widths`. The
    sample side counts hits in the box; the kernel side integrates
    ``2 pi^2 p_t`` over the same box by Gauss-Legendre, so both sides
    estimate the same box average and no smoothing bias enters the
    comparison. The CI is a Poisson bootstrap of the count. Points with
    fewer than ``min_count`` hits, or boxes leaving the radial domain, are
    flagged as sparse rather than failed.
    """
    from .kernel.heat import p_t_batch
    from .radial.coords import canonical_point_array

    R = batch.radial
    n = len(R)
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    Rp = radial_coords_array(pts)
    half = kde_half_widths(batch.config.t, bandwidth)
    vol = float(np.prod(2 * half))
    u, w = np.polynomial.legendre.leggauss(nodes)
    rng = np.random.default_rng(seed)
    rows = []
    for k, c in enumerate(Rp):
        inside = _box_inside(c, half)
        grid = np.stack(np.meshgrid(u, u, u, indexing="ij"), axis=-1).reshape(-1, 3)
        wts = (w[:, None, None] * w[None, :, None] * w[None, None, :]).reshape(-1) / 8
        q_nodes = RADIAL_DENSITY_FACTOR * p_t_batch(batch.config.t, canonical_point_array(c + grid * half), spec)
        q_box = float((wts * q_nodes).sum())
        count = int(np.all(np.abs(R - c) <= half, axis=1).sum())
        est = count / (n * vol)
        boot = rng.poisson(count, size=n_boot) / (n * vol)
        lo, hi = np.quantile(boot, [0.025, 0.975])
        rows.append({"point": pts[k].tolist(), "radial": c.tolist(), "kde": est, "kernel": q_box,
                     "rel_discrepancy": est / q_box - 1,
                     "ci_rel": [float(lo / q_box - 1), float(hi / q_box - 1)],
                     "count": count, "sparse": bool(count < min_count or not inside)})
    dense = [abs(r["rel_discrepancy"]) for r in rows if not r["sparse"]]
    return {"t": batch.config.t, "n_paths": n, "dt": batch.config.dt_effective, "bandwidth": bandwidth,
            "half_widths": half.tolist(), "rows": rows, "max_abs_rel": max(dense) if dense else None,
            "n_sparse": sum(r["sparse"] for r in rows)}


def bulk_points(t: float, n: int, spec=None, seed: int = 0, level: float = 0.1,
                bandwidth: float = KDE_BANDWIDTH, candidates: int = 800) -> np.ndarray:
    """Points with ``p_t >= level * p_t(0)`` whose comparison box lies inside
    the radial domain."""
    from .kernel.heat import p_t_batch, peak

    rng = np.random.default_rng(seed)
    # candidates at half the natural spread, where most clear the level
    g = 0.5 * np.concatenate([rng.standard_normal((candidates, 3)) * math.sqrt(2 * t),
                              rng.standard_normal((candidates, 3)) * t], axis=1)
    half = kde_half_widths(t, bandwidth)
    r = radial_coords_array(g)
    g = g[[_box_inside(c, half) for c in r]]
    p = p_t_batch(t, g, spec)
    g = g[p >= level * peak(t)]
    if len(g) < n:
        raise ValueError("not enough bulk candidates; raise `candidates`")
    return g[:n]
