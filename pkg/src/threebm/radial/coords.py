"""Radial coordinates ``(r1, r2, z) = (|x|^2, |y|^2, x.y)`` and lifting."""
from __future__ import annotations

import math
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

from ..algebra.group import Point6
from ..algebra.polynomial import COORDS, MultiPoly

RADIAL_NAMES = ("r1", "r2", "z")


class RadialPoint(NamedTuple):
    r1: object
    r2: object
    z: object

    def is_valid(self, tol: float = 0.0) -> bool:
        return self.r1 >= -tol and self.r2 >= -tol and self.z * self.z <= self.r1 * self.r2 + tol

    @property
    def gram_gap(self):
        """``r1 r2 - z^2 = |x cross y|^2``."""
        return self.r1 * self.r2 - self.z * self.z


def radial_coords(g: Sequence) -> RadialPoint:
    x, y = g[0:3], g[3:6]
    return RadialPoint(sum(v * v for v in x), sum(v * v for v in y), sum(a * b for a, b in zip(x, y)))


def radial_coords_array(g: np.ndarray) -> np.ndarray:
    g = np.asarray(g, dtype=float)
    x, y = g[..., :3], g[..., 3:]
    return np.stack([(x * x).sum(-1), (y * y).sum(-1), (x * y).sum(-1)], axis=-1)


def canonical_point(p: Sequence) -> Point6:
    """Representative ``(sqrt r1, 0, 0, z/sqrt r1, 0, sqrt(r2 - z^2/r1))``.

    For ``r1 = 0`` the representative is ``(0, 0, 0, sqrt r2, 0, 0)``.
    """
    r1, r2, z = (float(v) for v in p)
    if r1 < 0 or r2 < 0 or z * z > r1 * r2 * (1 + 1e-12) + 1e-300:
        raise ValueError(f"not a radial point: {tuple(p)}")
    if r1 == 0.0:
        return Point6(0.0, 0.0, 0.0, math.sqrt(r2), 0.0, 0.0)
    s = math.sqrt(r1)
    rest = max(r2 - z * z / r1, 0.0)
    return Point6(s, 0.0, 0.0, z / s, 0.0, math.sqrt(rest))


def canonical_point_array(p: np.ndarray) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    r1, r2, z = p[..., 0], p[..., 1], p[..., 2]
    out = np.zeros(p.shape[:-1] + (6,))
    s = np.sqrt(r1)
    safe = np.where(s > 0, s, 1.0)
    out[..., 0] = s
    out[..., 3] = np.where(s > 0, z / safe, np.sqrt(r2))
    out[..., 5] = np.where(s > 0, np.sqrt(np.maximum(r2 - z * z / np.where(r1 > 0, r1, 1.0), 0.0)), 0.0)
    return out


_R_IMAGES = None


def _generator_images() -> tuple[MultiPoly, MultiPoly, MultiPoly]:
    global _R_IMAGES
    if _R_IMAGES is None:
        x1, x2, x3, y1, y2, y3 = MultiPoly.gens(COORDS)
        _R_IMAGES = (x1 * x1 + x2 * x2 + x3 * x3, y1 * y1 + y2 * y2 + y3 * y3, x1 * y1 + x2 * y2 + x3 * y3)
    return _R_IMAGES


def radial_poly(terms: dict) -> MultiPoly:
    """Polynomial in ``(r1, r2, z)`` from ``{(a, b, c): coeff}``."""
    return MultiPoly(terms, RADIAL_NAMES)


def radial_gens() -> tuple[MultiPoly, MultiPoly, MultiPoly]:
    return MultiPoly.gens(RADIAL_NAMES)


def lift_radial(f: MultiPoly) -> MultiPoly:
    """Substitute ``r1, r2, z`` by their expressions in the six coordinates."""
    if f.names != RADIAL_NAMES:
        raise ValueError("expected a polynomial in (r1, r2, z)")
    return f.substitute(_generator_images())


def random_rotation(rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed element of SO(3)."""
    q, r = np.linalg.qr(rng.standard_normal((3, 3)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def rotate(U: np.ndarray, g: Sequence) -> np.ndarray:
    """Simultaneous rotation ``(x, y) -> (Ux, Uy)``; a group automorphism."""
    g = np.asarray(g, dtype=float)
    return np.concatenate([g[..., :3] @ U.T, g[..., 3:] @ U.T], axis=-1)


def exact_radial_point(g: Sequence) -> RadialPoint:
    return radial_coords([Fraction(v) for v in g])
