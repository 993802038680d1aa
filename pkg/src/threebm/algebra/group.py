"""Group law of the three Brownian motions model on R^6.

Coordinates are ``(x1, x2, x3, y1, y2, y3)``; the vertical slot ``y_i``
accumulates the Levy area of the pair ``(x_{i+1}, x_{i+2})``. All subscripts
are cyclic in {1, 2, 3}; :func:`nxt` is the single place that convention
lives.
"""
from __future__ import annotations

from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np


def nxt(i: int, k: int = 1) -> int:
    """Zero-based slot of the cyclic index ``i + k`` (``i`` zero-based)."""
    return (i + k) % 3


class Point6(NamedTuple):
    x1: object = 0
    x2: object = 0
    x3: object = 0
    y1: object = 0
    y2: object = 0
    y3: object = 0

    @property
    def x(self) -> tuple:
        return self[0:3]

    @property
    def y(self) -> tuple:
        return self[3:6]

    @classmethod
    def from_xy(cls, x: Sequence, y: Sequence) -> "Point6":
        return cls(*x, *y)

    @classmethod
    def exact(cls, values: Sequence) -> "Point6":
        return cls(*(Fraction(v) for v in values))

    def as_float(self) -> np.ndarray:
        return np.array([float(v) for v in self])


IDENTITY = Point6()


def _cross(a: Sequence, b: Sequence) -> tuple:
    return tuple(a[nxt(i)] * b[nxt(i, 2)] - a[nxt(i, 2)] * b[nxt(i)] for i in range(3))


def multiply(a: Sequence, b: Sequence) -> Point6:
    """Group product ``a o b``; exact for rational inputs."""
    ax, ay, bx, by = a[0:3], a[3:6], b[0:3], b[3:6]
    c = _cross(ax, bx)
    half = Fraction(1, 2) if all(isinstance(v, (int, Fraction)) for v in (*ax, *bx)) else 0.5
    x = tuple(ax[i] + bx[i] for i in range(3))
    y = tuple(ay[i] + by[i] + half * c[i] for i in range(3))
    return Point6(*x, *y)


def inverse(g: Sequence) -> Point6:
    return Point6(*(-v for v in g))


def dilate(lam, g: Sequence) -> Point6:
    """Dilation ``(x, y) -> (lam x, lam^2 y)``."""
    if not lam > 0:
        raise ValueError("dilation factor must be positive")
    return Point6(*(lam * v for v in g[0:3]), *(lam * lam * v for v in g[3:6]))


def multiply_array(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Vectorized group product on arrays of shape (..., 6)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    ax, bx = a[..., :3], b[..., :3]
    out = np.empty(np.broadcast_shapes(a.shape, b.shape))
    out[..., :3] = ax + bx
    out[..., 3:] = a[..., 3:] + b[..., 3:] + 0.5 * np.cross(ax, bx)
    return out


def dilate_array(lam: float, g: np.ndarray) -> np.ndarray:
    if not lam > 0:
        raise ValueError("dilation factor must be positive")
    g = np.asarray(g, dtype=float)
    out = g.copy()
    out[..., :3] *= lam
    out[..., 3:] *= lam * lam
    return out
