"""Audits that need ``P_t`` of test functions: Driver-Melcher, reverse local
Poincare and the three radial inequalities.

Every quantity is a smooth function of a few sample means, so its standard
error comes from the delta method applied to per-path influence values.
A gap is a violation only when it is below ``-3`` standard errors.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..algebra.carre import gamma
from ..algebra.group import multiply_array
from ..algebra.polynomial import COORDS, MultiPoly
from ..radial.coords import RADIAL_NAMES, radial_coords_array
from ..sampler import SampleBatch, SimConfig
from .report import INDETERMINATE, VerifyReport, classify
from .semigroup import semigroup_apply, stderr_of, terminal_points

Z = 3.0
DIVISION_FLOOR = 1e-12


def _grad_sq(sv):
    """``Gamma(P_t f) = sum_i (X_i P_t f)^2`` and its influence values."""
    D = sv.grad
    return float(D @ D), 2 * sv.dvalues @ D


def default_dm_family() -> dict:
    x1, x2, x3, y1, y2, y3 = MultiPoly.gens(COORDS)
    return {"x1": x1, "x1+2x2-x3": x1 + x2 * 2 - x3, "y1": y1, "y3+x1x2": y3 + x1 * x2,
            "x1^2": x1 * x1, "r1": x1 * x1 + x2 * x2 + x3 * x3, "x1*y1": x1 * y1}


def driver_melcher_ratio(f: MultiPoly | dict | None = None, t: float = 1.0, cfg: SimConfig | None = None,
                         batch: SampleBatch | None = None) -> VerifyReport:
    """``Gamma(P_t f)(0) / P_t(Gamma(f))(0)`` for each polynomial of a family.

    ``Gamma(f)`` is exact. The largest ratio is the empirical constant.
    Ratios whose denominator is below the division floor are reported as
    indeterminate.
    """
    family = default_dm_family() if f is None else (f if isinstance(f, dict) else {"f": f})
    G = terminal_points(t, cfg, batch)
    rows = []
    for name, poly in family.items():
        sv = semigroup_apply(poly, t, batch=_as_batch(G, t, cfg, batch), derivatives=True)
        N, psiN = _grad_sq(sv)
        gam = gamma(poly).evaluate_array(G)
        den = float(gam.mean())
        if abs(den) < DIVISION_FLOOR:
            rows.append({"f": name, "ratio": math.nan, "stderr": math.nan, "margin": math.nan, "tol": 0.0,
                         "status": INDETERMINATE, "note": "denominator below floor"})
            continue
        R = N / den
        se = stderr_of((psiN - R * gam) / den)
        rows.append({"f": name, "ratio": R, "stderr": se, "numerator": N, "denominator": den,
                     "eps": sv.eps, "flagged": sv.flagged, "margin": 0.0, "tol": 0.0, "status": "satisfied"})
    ratios = [r["ratio"] for r in rows if math.isfinite(r["ratio"])]
    return VerifyReport("driver-melcher", {"t": t, "family": list(family)}, rows,
                        {"C_emp": max(ratios) if ratios else math.nan}, {"z": Z, "division_floor": DIVISION_FLOOR})


def _as_batch(G: np.ndarray, t: float, cfg, batch) -> SampleBatch:
    if batch is not None:
        return batch
    return SampleBatch(G, cfg.with_(t=t))


def default_poincare_family() -> dict:
    x1, x2, x3, y1, y2, y3 = MultiPoly.gens(COORDS)
    return {"1": MultiPoly.constant(1), "x1": x1, "x2-x3": x2 - x3, "y2": y2, "x1^2": x1 * x1,
            "x1*x2+y3": x1 * x2 + y3, "r1": x1 * x1 + x2 * x2 + x3 * x3}


def reverse_poincare_gap(f: MultiPoly | dict | None = None, t: float = 1.0, cfg: SimConfig | None = None,
                         batch: SampleBatch | None = None) -> VerifyReport:
    """``(3/2)(P_t f^2 - (P_t f)^2) - t Gamma(P_t f)`` at the identity, per function."""
    family = default_poincare_family() if f is None else (f if isinstance(f, dict) else {"f": f})
    G = terminal_points(t, cfg, batch)
    b = _as_batch(G, t, cfg, batch)
    rows = []
    for name, poly in family.items():
        sv = semigroup_apply(poly, t, batch=b, derivatives=True)
        N, psiN = _grad_sq(sv)
        v, m = sv.values, sv.value
        gap = 1.5 * (float((v * v).mean()) - m * m) - t * N
        psi = 1.5 * (v * v - 2 * m * v) - t * psiN
        se = stderr_of(psi)
        rows.append({"f": name, "gap": gap, "stderr": se, "variance": float((v * v).mean()) - m * m,
                     "grad_sq": N, "margin": gap, "tol": Z * se, "status": classify(gap, Z * se)})
    return VerifyReport("reverse-poincare", {"t": t, "family": list(family)}, rows, {}, {"z": Z})


# radial inequalities -----------------------------------------------------

def gammahat_array(r: np.ndarray, dF: np.ndarray) -> np.ndarray:
    """``Gamma(f)`` of ``f = F(r1, r2, z)`` from the radial gradient of ``F``."""
    r1, r2, z = r[:, 0], r[:, 1], r[:, 2]
    F1, F2, Fz = dF[:, 0], dF[:, 1], dF[:, 2]
    return 4 * r1 * F1 ** 2 + (r1 * r2 - z * z) * F2 ** 2 + r2 * Fz ** 2 + 4 * z * F1 * Fz


@dataclass(frozen=True)
class RadialBump:
    """``F = offset + P(r1, r2, z) phi(s)`` with ``s = (r1^2 + r2) / R^4``.

    ``phi(s) = exp(-1 / (1 - s))`` on ``s < 1`` and 0 beyond, so ``F - offset``
    is smooth with support in the gauge ball of radius ``R``.
    """

    poly: MultiPoly
    radius: float = 2.0
    offset: float = 0.0

    def __post_init__(self):
        if self.poly.names != RADIAL_NAMES:
            raise ValueError("expected a polynomial in (r1, r2, z)")

    def _phi(self, r: np.ndarray):
        s = (r[:, 0] ** 2 + r[:, 1]) / self.radius ** 4
        inside = s < 1
        q = np.where(inside, 1 - s, 1.0)
        phi = np.where(inside, np.exp(-1 / q), 0.0)
        dphi = np.where(inside, -phi / (q * q), 0.0)
        return phi, dphi

    def value(self, r: np.ndarray) -> np.ndarray:
        phi, _ = self._phi(r)
        return self.offset + self.poly.evaluate_array(r) * phi

    def grad(self, r: np.ndarray) -> np.ndarray:
        phi, dphi = self._phi(r)
        P = self.poly.evaluate_array(r)
        R4 = self.radius ** 4
        ds = np.stack([2 * r[:, 0] / R4, np.full(len(r), 1 / R4), np.zeros(len(r))], axis=1)
        dP = np.stack([self.poly.diff(k).evaluate_array(r) for k in range(3)], axis=1)
        return dP * phi[:, None] + (P * dphi)[:, None] * ds

    def __call__(self, g: np.ndarray) -> np.ndarray:
        return self.value(radial_coords_array(g))

    def gamma(self, g: np.ndarray) -> np.ndarray:
        r = radial_coords_array(g)
        return gammahat_array(r, self.grad(r))


def default_radial_family() -> dict:
    r1, r2, z = MultiPoly.gens(RADIAL_NAMES)
    one = MultiPoly.constant(1, RADIAL_NAMES)
    return {
        "r1*bump(2)": RadialBump(r1, 2.0),
        "r1*bump(3)": RadialBump(r1, 3.0),
        "bump(1.5)": RadialBump(one, 1.5),
        "r2*bump(2.5)": RadialBump(r2, 2.5),
        "z^2*bump(2.5)": RadialBump(z * z, 2.5),
        "1+r1*bump(2)": RadialBump(r1, 2.0, offset=1.0),
        "1+(r1+z)*bump(2.5)": RadialBump(r1 + z, 2.5, offset=1.0),
    }


def radial_inequality_gaps(f: RadialBump | dict | None = None, t: float = 1.0, g=None,
                           cfg: SimConfig | None = None, batch: SampleBatch | None = None) -> VerifyReport:
    """Three gaps for a radial ``f`` at ``g``:

    (i)   ``P_t(sqrt Gamma(f)) - sqrt Gamma(P_t f)``
    (ii)  ``t P_t(Gamma(f)/f) - [P_t(f log f) - P_t f log P_t f]``
    (iii) ``4 sqrt(t) P_t(sqrt Gamma(f)) - P_t |f - P_t f(g)|``

    Raises
    ------
    ValueError
        If ``f`` takes a negative value on the samples, or vanishes where
        ``Gamma(f)`` does not; (ii) is undefined there.
    """
    family = default_radial_family() if f is None else (f if isinstance(f, dict) else {"f": f})
    g = np.zeros(6) if g is None else np.asarray(g, dtype=float)
    G = terminal_points(t, cfg, batch)
    b = _as_batch(G, t, cfg, batch)
    pts = multiply_array(g, G)
    rows = []
    for name, F in family.items():
        sv = semigroup_apply(F, t, g, batch=b, derivatives=True)
        v, m = sv.values, sv.value
        gam = F.gamma(pts)
        if np.any(v < 0) or np.any((v == 0) & (gam > 0)):
            raise ValueError(f"{name}: the entropy gap needs f >= 0, and f > 0 where Gamma(f) > 0")
        sg = np.sqrt(gam)
        N, psiN = _grad_sq(sv)
        sN = math.sqrt(N)
        # (i)
        g1 = float(sg.mean()) - sN
        psi1 = sg - (psiN / (2 * sN) if sN > 0 else 0.0)
        # (ii)
        ratio = np.divide(gam, v, out=np.zeros_like(v), where=v > 0)
        flogf = np.where(v > 0, v * np.log(np.where(v > 0, v, 1.0)), 0.0)
        ent = float(flogf.mean()) - (m * math.log(m) if m > 0 else 0.0)
        g2 = t * float(ratio.mean()) - ent
        psi2 = t * ratio - (flogf - (math.log(m) + 1) * v if m > 0 else flogf)
        # (iii)
        dev = np.abs(v - m)
        sbar = float(np.sign(v - m).mean())
        g3 = 4 * math.sqrt(t) * float(sg.mean()) - float(dev.mean())
        psi3 = 4 * math.sqrt(t) * sg - (dev - sbar * (v - m))
        for label, gap, psi in (("li", g1, psi1), ("lsi", g2, psi2), ("l1", g3, psi3)):
            se = stderr_of(psi)
            rows.append({"f": name, "inequality": label, "gap": gap, "stderr": se, "margin": gap, "tol": Z * se,
                         "status": classify(gap, Z * se), "flagged": sv.flagged})
    return VerifyReport("radial-inequalities", {"t": t, "g": g.tolist(), "family": list(family)}, rows, {},
                        {"z": Z})
