"""Quadrature for the heat-kernel Fourier integral over the vertical dual variable.

The raw kernel is

    p1_raw(x, y) = (2 pi)^(-15/2) int_{R^3} cos(y.a) K(|a|)
                   exp(-(c(|a|) (|x|^2 - (x.a~)^2) + (x.a~)^2) / 2) da

with ``K(r) = (r/2)/sinh(r/2)``, ``c(r) = (r/2) coth(r/2)`` and ``a~ = a/|a|``.

Two schemes are provided. ``"spherical"`` takes the polar axis along ``x``
so the azimuthal integral is a Bessel function, leaving a smooth 2D
integral in ``(r, psi)``. ``"tensor"`` is plain Gauss-Legendre on the cube
``[-R, R]^3``; it is slower and serves as an independent cross-check.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import j0, j1

from ..errors import NonConvergenceError

PREFACTOR = (2 * math.pi) ** -7.5
SCHEMES = ("spherical", "tensor")

# reference points for the convergence gate, in raw coordinates
GATE_POINTS = np.array([
    [0, 0, 0, 0, 0, 0],
    [1, 0, 0, 0, 1, 0],
    [0.7, -0.4, 0.2, 0.5, 0.5, -1.0],
    [0, 0, 0, 0, 0, 2.0],
    [1.5, 1.0, -0.5, -1.0, 0.3, 0.8],
], dtype=float)


@dataclass(frozen=True)
class QuadratureSpec:
    """Truncation and node counts for :func:`p1_raw`.

    Parameters
    ----------
    truncation_radius : float
        Integrate over ``|a| <= R``. The envelope ``r^3 K(r)`` is below
        ``1e-12`` of its peak beyond ``R = 80``.
    nodes_per_axis : int
        Gauss-Legendre nodes in ``r`` (spherical) or per Cartesian axis (tensor).
    angular_nodes : int
        Nodes in the polar angle for the spherical scheme.
    scheme : str
        ``"spherical"`` or ``"tensor"``.
    tolerance : float
        Relative change allowed between ``n`` and ``2n`` nodes at the gate
        points, measured against the kernel scale ``p1_raw(0)``.
    """

    truncation_radius: float = 80.0
    nodes_per_axis: int = 320
    angular_nodes: int = 96
    scheme: str = "spherical"
    tolerance: float = 1e-9

    def __post_init__(self):
        if self.truncation_radius <= 0 or self.nodes_per_axis < 2 or self.angular_nodes < 2:
            raise ValueError("truncation radius and node counts must be positive")
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}")

    def doubled(self) -> "QuadratureSpec":
        return QuadratureSpec(self.truncation_radius, 2 * self.nodes_per_axis, 2 * self.angular_nodes,
                              self.scheme, self.tolerance)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, text: str | dict) -> "QuadratureSpec":
        data = json.loads(text) if isinstance(text, str) else dict(text)
        return cls(**data)


@dataclass(frozen=True)
class KernelValue:
    value: float
    imag_leak: float
    spec: QuadratureSpec = field(default_factory=QuadratureSpec)


# envelope pieces ---------------------------------------------------------

def envelope_K(r: np.ndarray) -> np.ndarray:
    """``(r/2) / sinh(r/2)`` without overflow."""
    r = np.asarray(r, dtype=float)
    small = r < 1e-4
    rs = np.where(small, 1.0, r)
    big = rs * np.exp(-rs / 2) / -np.expm1(-rs)
    return np.where(small, 1.0 - r * r / 24.0, big)


def coth_factor(r: np.ndarray) -> np.ndarray:
    """``(r/2) coth(r/2)``."""
    r = np.asarray(r, dtype=float)
    small = r < 1e-4
    rs = np.where(small, 1.0, r)
    big = (rs / 2) * (1 + np.exp(-rs)) / -np.expm1(-rs)
    return np.where(small, 1.0 + r * r / 12.0, big)


def _one_minus_c_over_r2(r: np.ndarray) -> np.ndarray:
    """``(1 - c(r)) / r^2``, analytic in ``r^2``."""
    r = np.asarray(r, dtype=float)
    small = r < 1e-2
    rs = np.where(small, 1.0, r)
    return np.where(small, -1.0 / 12 + r * r / 720.0, (1 - coth_factor(rs)) / (rs * rs))


@lru_cache(maxsize=None)
def _gl(n: int, a: float, b: float) -> tuple[np.ndarray, np.ndarray]:
    t, w = np.polynomial.legendre.leggauss(n)
    half = 0.5 * (b - a)
    return half * t + 0.5 * (a + b), half * w


# geometry of a point relative to the polar axis --------------------------

def _frames(x: np.ndarray, y: np.ndarray):
    """Polar axis ``u`` (along x), parallel/perpendicular parts of y, and
    the unit vector ``e`` of the perpendicular part."""
    xn = np.linalg.norm(x, axis=-1)
    yn = np.linalg.norm(y, axis=-1)
    u = np.zeros_like(x)
    u[:] = (0.0, 0.0, 1.0)
    has_x = xn > 0
    u[has_x] = x[has_x] / xn[has_x, None]
    # with x = 0 the kernel depends on |y| only; align the axis with y
    only_y = ~has_x & (yn > 0)
    u[only_y] = y[only_y] / yn[only_y, None]
    ypar = (y * u).sum(-1)
    yperp_vec = y - ypar[:, None] * u
    yperp = np.linalg.norm(yperp_vec, axis=-1)
    e = np.zeros_like(x)
    ok = yperp > 1e-300
    e[ok] = yperp_vec[ok] / yperp[ok, None]
    return xn, u, ypar, yperp, e


def _split(points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if points.shape[-1] != 6:
        raise ValueError("points must have six coordinates")
    return points[:, :3], points[:, 3:]


def _chunks(n: int, per_point: int, budget: int = 4_000_000):
    step = max(1, budget // max(per_point, 1))
    for s in range(0, n, step):
        yield slice(s, min(n, s + step))


# spherical scheme --------------------------------------------------------

def _spherical_grid(spec: QuadratureSpec):
    r, wr = _gl(spec.nodes_per_axis, 0.0, spec.truncation_radius)
    psi, wp = _gl(spec.angular_nodes, 0.0, math.pi)
    K, c = envelope_K(r), coth_factor(r)
    mu, s = np.cos(psi), np.sin(psi)
    base = (wr * r * r * K)[:, None] * (wp * s)[None, :] * 2 * math.pi
    return r, mu, s, c, base


def _spherical_values(x, y, spec, with_grad: bool):
    r, mu, s, c, base = _spherical_grid(spec)
    xn, u, ypar, yperp, e = _frames(x, y)
    n = len(x)
    val = np.empty(n)
    leak = np.empty(n)
    grad = np.empty((n, 6)) if with_grad else None
    R = r[:, None]
    for sl in _chunks(n, r.size * mu.size):
        xn2 = (xn[sl] ** 2)[:, None, None]
        expo = np.exp(-0.5 * xn2 * (c[None, :, None] * s[None, None, :] ** 2 + mu[None, None, :] ** 2))
        a = R[None] * mu[None, None, :] * ypar[sl, None, None]
        b = R[None] * s[None, None, :] * yperp[sl, None, None]
        J0 = j0(b)
        W = base[None] * expo
        cos_a, sin_a = np.cos(a), np.sin(a)
        val[sl] = (W * cos_a * J0).sum(axis=(1, 2))
        leak[sl] = np.abs((W * sin_a * J0).sum(axis=(1, 2)))
        if with_grad:
            J1 = j1(b)
            # horizontal: d/dx_j of the exponent is -c x_j + (c - 1)(x.w) w_j,
            # w = mu u + sin(psi)(cos(phi) e + sin(phi) e')
            cm1 = (c - 1)[None, :, None]
            xn_ = xn[sl, None, None]
            t_scalar = (W * cos_a * J0 * (-c[None, :, None])).sum(axis=(1, 2))
            t_u = (W * cos_a * J0 * cm1 * xn_ * mu[None, None, :] ** 2).sum(axis=(1, 2))
            t_e = (W * (-sin_a) * J1 * cm1 * xn_ * (mu * s)[None, None, :]).sum(axis=(1, 2))
            gx = t_scalar[:, None] * x[sl] + t_u[:, None] * u[sl] + t_e[:, None] * e[sl]
            # vertical: d/dy_i cos(y.a) = -sin(y.a) a_i
            v_u = -(W * sin_a * J0 * R[None] * mu[None, None, :]).sum(axis=(1, 2))
            v_e = -(W * cos_a * J1 * R[None] * s[None, None, :]).sum(axis=(1, 2))
            gy = v_u[:, None] * u[sl] + v_e[:, None] * e[sl]
            grad[sl] = np.concatenate([gx, gy], axis=1)
    return val, leak, grad


# tensor scheme -----------------------------------------------------------

def _tensor_values(x, y, spec):
    t, w = _gl(spec.nodes_per_axis, -spec.truncation_radius, spec.truncation_radius)
    A = np.stack(np.meshgrid(t, t, t, indexing="ij"), axis=-1).reshape(-1, 3)
    Wt = (w[:, None, None] * w[None, :, None] * w[None, None, :]).reshape(-1)
    rr = np.linalg.norm(A, axis=1)
    keep = rr <= spec.truncation_radius
    A, Wt, rr = A[keep], Wt[keep], rr[keep]
    K, c, q = envelope_K(rr), coth_factor(rr), _one_minus_c_over_r2(rr)
    n = len(x)
    val = np.empty(n)
    leak = np.empty(n)
    for k in range(n):
        xa = A @ x[k]
        expo = np.exp(-0.5 * (c * (x[k] @ x[k]) + q * xa * xa))
        ya = A @ y[k]
        WK = Wt * K * expo
        val[k] = (WK * np.cos(ya)).sum()
        leak[k] = abs((WK * np.sin(ya)).sum())
    return val, leak


# public evaluation -------------------------------------------------------

# node counts in a spec resolve |y| <= RESOLVED_Y; larger |y| gets doubled
# grids, one doubling per factor of two, up to MAX_LEVEL
RESOLVED_Y = 1.0
MAX_LEVEL = 3


def _levels(y: np.ndarray) -> np.ndarray:
    yn = np.linalg.norm(y, axis=-1)
    lev = np.ceil(np.log2(np.maximum(yn, RESOLVED_Y) / RESOLVED_Y)).astype(int)
    return np.minimum(lev, MAX_LEVEL + 1)


def _refined(spec: QuadratureSpec, level: int) -> QuadratureSpec:
    k = 2 ** level
    return QuadratureSpec(spec.truncation_radius, k * spec.nodes_per_axis, k * spec.angular_nodes,
                          spec.scheme, spec.tolerance)


def _evaluate(points, spec: QuadratureSpec, with_grad: bool):
    x, y = _split(points)
    n = len(x)
    val, leak = np.zeros(n), np.zeros(n)
    grad = np.zeros((n, 6)) if with_grad else None
    lev = _levels(y)
    # beyond the last level the kernel is below the absolute accuracy of
    # the quadrature (it decays like exp(-2 pi |y|)); report zero
    for L in np.unique(lev[lev <= MAX_LEVEL]):
        idx = np.flatnonzero(lev == L)
        sp = _refined(spec, int(L))
        if spec.scheme == "spherical":
            v, lk, g = _spherical_values(x[idx], y[idx], sp, with_grad)
            if with_grad:
                grad[idx] = g
        else:
            v, lk = _tensor_values(x[idx], y[idx], sp)
        val[idx], leak[idx] = v, lk
    return PREFACTOR * val, PREFACTOR * leak, (PREFACTOR * grad if with_grad else None)


def p1_raw_batch(points, spec: QuadratureSpec | None = None, check: bool = True):
    """Raw kernel at each row of ``points``; returns ``(values, imag_leak)``."""
    spec = spec or QuadratureSpec()
    if check:
        convergence_gate(spec)
    v, leak, _ = _evaluate(points, spec, False)
    return v, leak


def p1_raw(x, y, spec: QuadratureSpec | None = None) -> KernelValue:
    """Raw kernel at a single point ``(x, y)``."""
    spec = spec or QuadratureSpec()
    v, leak = p1_raw_batch(np.concatenate([np.ravel(x), np.ravel(y)])[None], spec)
    return KernelValue(float(v[0]), float(leak[0]), spec)


def grad_p1_raw_batch(points, spec: QuadratureSpec | None = None, check: bool = True):
    """Values and the six Euclidean partial derivatives ``(d_x, d_y)``."""
    spec = spec or QuadratureSpec()
    if spec.scheme != "spherical":
        raise ValueError("derivatives are implemented for the spherical scheme")
    if check:
        convergence_gate(spec)
    v, _, g = _evaluate(points, spec, True)
    return v, g


_GATE_CACHE: dict = {}


def convergence_gate(spec: QuadratureSpec) -> dict:
    """Compare ``spec`` with doubled node counts on :data:`GATE_POINTS`.

    Raises :class:`NonConvergenceError` with the diagnostic when the
    largest change exceeds ``spec.tolerance`` times the kernel scale.
    """
    key = spec.to_json()
    if key in _GATE_CACHE:
        diag = _GATE_CACHE[key]
    else:
        pts = GATE_POINTS if spec.scheme == "spherical" else GATE_POINTS[:2]
        a, _ = p1_raw_batch(pts, spec, check=False)
        b, _ = p1_raw_batch(pts, spec.doubled(), check=False)
        scale = PREFACTOR * 4 * math.pi ** 5
        diag = {"max_change": float(np.max(np.abs(a - b)) / scale), "tolerance": spec.tolerance,
                "values": a.tolist()}
        _GATE_CACHE[key] = diag
    if not diag["max_change"] <= spec.tolerance:
        raise NonConvergenceError(f"quadrature spec not converged: {diag['max_change']:.3e} > {spec.tolerance:.1e}",
                                  diag)
    return diag
