"""Monte Carlo audit of the raw kernel's total mass and of its time scale.

The raw integral carries a printed prefactor. Integrating it over R^6 by
importance sampling gives its mass; the first radial moments, compared with
``E r1 = 6t`` and ``E r2 = 3t^2``, give the heat time it represents.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np
from scipy import stats

from .heat import RAW_MASS, RAW_TIME
from .quadrature import QuadratureSpec, p1_raw_batch


@dataclass(frozen=True)
class ImportanceDensity:
    """Gaussian ``x`` (variance ``2 tau`` per axis), then Laplace ``y_i`` given ``x``.

    The Laplace scale is ``y_scale * tau * (1 + growth |x| / sqrt(2 tau))``.
    The kernel decays only exponentially in ``y``, so a Gaussian proposal
    there gives weights of unbounded variance. The conditional spread of
    ``y`` also grows with ``|x|``, which the scale follows.
    """

    tau: float = RAW_TIME
    y_scale: float = 0.6
    growth: float = 0.5

    def _scale(self, x: np.ndarray) -> np.ndarray:
        xn = np.linalg.norm(x, axis=1) / math.sqrt(2 * self.tau)
        return (self.y_scale * self.tau * (1 + self.growth * xn))[:, None]

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        x = rng.standard_normal((n, 3)) * math.sqrt(2 * self.tau)
        y = rng.laplace(0.0, 1.0, size=(n, 3)) * self._scale(x)
        return np.concatenate([x, y], axis=1)

    def logpdf(self, g: np.ndarray) -> np.ndarray:
        g = np.atleast_2d(g)
        x, y = g[:, :3], g[:, 3:]
        lx = -0.5 * (x * x).sum(1) / (2 * self.tau) - 1.5 * math.log(2 * math.pi * 2 * self.tau)
        ly = stats.laplace.logpdf(y, scale=self._scale(x)).sum(1)
        return lx + ly


@dataclass(frozen=True)
class Estimate:
    value: float
    stderr: float
    n: int

    def ci(self, z: float = 3.0) -> tuple[float, float]:
        return self.value - z * self.stderr, self.value + z * self.stderr

    def covers(self, c: float, z: float = 3.0) -> bool:
        lo, hi = self.ci(z)
        return lo <= c <= hi


def importance_estimate(target: Callable[[np.ndarray], np.ndarray], density: ImportanceDensity,
                        n: int, rng: np.random.Generator) -> tuple[Estimate, np.ndarray, np.ndarray]:
    """Estimate ``int target`` with ``n`` draws; also returns samples and weights."""
    g = density.sample(rng, n)
    w = target(g) / np.exp(density.logpdf(g))
    return Estimate(float(w.mean()), float(w.std(ddof=1) / math.sqrt(n)), n), g, w


def _ratio_estimate(f: np.ndarray, w: np.ndarray) -> Estimate:
    """Self-normalized ``sum f w / sum w`` with a delta-method standard error."""
    n = len(w)
    m = (f * w).sum() / w.sum()
    se = math.sqrt(((w * (f - m)) ** 2).sum()) / w.sum()
    return Estimate(float(m), float(se), n)


@dataclass(frozen=True)
class NormalizationAudit:
    mass: Estimate
    expected_mass: float
    mean_r1: Estimate
    mean_r2: Estimate
    mean_z: Estimate
    implied_time_r1: float
    implied_time_r2: float
    spec: QuadratureSpec
    seed: int

    def to_json(self) -> dict:
        d = asdict(self)
        d["mass_ci"] = list(self.mass.ci())
        d["mass_ratio"] = self.mass.value / self.expected_mass
        d["spec"] = asdict(self.spec)
        return d


def normalization(spec: QuadratureSpec | None = None, mc_budget: int = 4000, seed: int = 0,
                  density: ImportanceDensity | None = None, chunk: int = 500) -> NormalizationAudit:
    """Importance-sampled mass and radial moments of the raw kernel."""
    spec = spec or QuadratureSpec()
    density = density or ImportanceDensity()
    rng = np.random.default_rng(seed)

    def target(g):
        out = np.empty(len(g))
        for s in range(0, len(g), chunk):
            out[s:s + chunk] = p1_raw_batch(g[s:s + chunk], spec)[0]
        return out

    mass, g, w = importance_estimate(target, density, mc_budget, rng)
    r1 = (g[:, :3] ** 2).sum(1)
    r2 = (g[:, 3:] ** 2).sum(1)
    z = (g[:, :3] * g[:, 3:]).sum(1)
    m1, m2, mz = _ratio_estimate(r1, w), _ratio_estimate(r2, w), _ratio_estimate(z, w)
    return NormalizationAudit(mass, RAW_MASS, m1, m2, mz, m1.value / 6, math.sqrt(max(m2.value, 0) / 3),
                              spec, seed)
