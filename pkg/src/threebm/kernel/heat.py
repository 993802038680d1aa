"""Heat kernel of ``P_t = exp(tL)`` at the identity, built on the raw integral.

The raw integral in :mod:`.quadrature` has total mass ``(2 pi)^-3`` and is
the density of the diffusion whose generator is ``L/2`` at time 1, which is
``exp(tL)`` at ``t = 1/2``. Both facts are audited numerically in
:mod:`.audit`. Here

    p_t(x, y) = (2t)^(-9/2) (2 pi)^3 p1_raw(x / sqrt(2t), y / (2t)).
"""
from __future__ import annotations

import math

import numpy as np

from ..algebra.group import multiply_array
from ..errors import UnderflowError
from .quadrature import PREFACTOR, QuadratureSpec, _gl, coth_factor, envelope_K, grad_p1_raw_batch, p1_raw_batch

HOMOGENEOUS_DIM = 9
# mass of the raw integral and the time at which it is the exp(tL) kernel
RAW_MASS = (2 * math.pi) ** -3
RAW_TIME = 0.5
KERNEL_FLOOR = 1e-300
# quadrature noise is about 1e-15 of the peak; log-derivatives are refused
# where the kernel is below this fraction of its value at the identity
RESOLUTION_FLOOR = 1e-10


def _points(g) -> np.ndarray:
    return np.atleast_2d(np.asarray(g, dtype=float))


def _raw_args(t: float, pts: np.ndarray) -> tuple[np.ndarray, float, float]:
    s = t / RAW_TIME
    q = np.empty_like(pts)
    q[:, :3] = pts[:, :3] / math.sqrt(s)
    q[:, 3:] = pts[:, 3:] / s
    return q, s, 1.0 / RAW_MASS


def p_t_batch(t: float, g, spec: QuadratureSpec | None = None, dim: float = HOMOGENEOUS_DIM) -> np.ndarray:
    """``p_t`` at each row of ``g``.

    ``dim`` is the exponent in the scaling prefactor; anything other than 9
    gives a deliberately wrong kernel, used as a negative control.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    q, s, norm = _raw_args(t, _points(g))
    v, _ = p1_raw_batch(q, spec)
    return s ** (-dim / 2) * norm * v


def p_t(t: float, g, spec: QuadratureSpec | None = None) -> float:
    return float(p_t_batch(t, g, spec)[0])


def p1(g, spec: QuadratureSpec | None = None) -> float:
    return p_t(1.0, g, spec)


def grad_p_t_batch(t: float, g, spec: QuadratureSpec | None = None) -> tuple[np.ndarray, np.ndarray]:
    """``p_t`` and its Euclidean gradient ``(d_x1.., d_y1..)`` at each row."""
    if t <= 0:
        raise ValueError("t must be positive")
    q, s, norm = _raw_args(t, _points(g))
    v, gr = grad_p1_raw_batch(q, spec)
    pre = s ** (-HOMOGENEOUS_DIM / 2) * norm
    gr = gr.copy()
    gr[:, :3] /= math.sqrt(s)
    gr[:, 3:] /= s
    return pre * v, pre * gr


def grad_p1(x, y, spec: QuadratureSpec | None = None) -> np.ndarray:
    _, gr = grad_p_t_batch(1.0, np.concatenate([np.ravel(x), np.ravel(y)])[None], spec)
    return gr[0]


def horizontal_from_euclidean(pts: np.ndarray, grad: np.ndarray) -> np.ndarray:
    """``X_i f`` from ``(d_x f, d_y f)``: ``X_i = d_i - x_{i+1}/2 dhat_{i+2} + x_{i+2}/2 dhat_{i+1}``."""
    x = pts[:, :3]
    dx, dy = grad[:, :3], grad[:, 3:]
    return dx - 0.5 * np.cross(x, dy)


def peak(t: float) -> float:
    """``p_t(0)``, from the closed-form value of the raw integral at the origin."""
    return (t / RAW_TIME) ** (-HOMOGENEOUS_DIM / 2) / RAW_MASS * PREFACTOR * 4 * math.pi ** 5


def below_resolution(t: float, values: np.ndarray, floor: float = KERNEL_FLOOR) -> np.ndarray:
    return ~(values > max(floor, RESOLUTION_FLOOR * peak(t)))


def _check_floor(t: float, values: np.ndarray, floor: float) -> None:
    bad = below_resolution(t, values, floor)
    if bad.any():
        raise UnderflowError(f"p_t below resolution floor at rows {np.flatnonzero(bad).tolist()}")


def horiz_grad_log_pt_batch(t: float, g, spec: QuadratureSpec | None = None,
                            floor: float = KERNEL_FLOOR) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``X_i log p_t``, its norm ``sqrt(Gamma(log p_t))`` and the vertical
    gradient ``Y_i log p_t`` at each row."""
    pts = _points(g)
    v, gr = grad_p_t_batch(t, pts, spec)
    _check_floor(t, v, floor)
    Xl = horizontal_from_euclidean(pts, gr) / v[:, None]
    Yl = gr[:, 3:] / v[:, None]
    return Xl, np.linalg.norm(Xl, axis=1), Yl


def horiz_grad_log_pt(t: float, g, spec: QuadratureSpec | None = None) -> tuple[np.ndarray, float]:
    Xl, mag, _ = horiz_grad_log_pt_batch(t, g, spec)
    return Xl[0], float(mag[0])


def _flow_points(pts: np.ndarray, eps: float) -> np.ndarray:
    """``g o (+-eps e_i, 0)`` for i = 1..3, shape (n, 3, 2, 6)."""
    n = len(pts)
    out = np.empty((n, 3, 2, 6))
    for i in range(3):
        for k, sgn in enumerate((1.0, -1.0)):
            h = np.zeros(6)
            h[i] = sgn * eps
            out[:, i, k] = multiply_array(pts, h)
    return out


def heat_residual_batch(t: float, g, spec: QuadratureSpec | None = None, eps: float | None = None,
                        dt: float | None = None, dim: float = HOMOGENEOUS_DIM) -> np.ndarray:
    """``|d_t p_t - L p_t| / p_t`` by central differences in ``t`` and along
    the flows of ``X_i``.

    Default steps are ``1e-3`` in scaled units: ``eps = 1e-3 sqrt(t)`` and
    ``dt = 1e-3 t``. Both errors are second order.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    pts = _points(g)
    eps = eps if eps is not None else 1e-3 * math.sqrt(t)
    dt = dt if dt is not None else 1e-3 * t
    n = len(pts)
    flows = _flow_points(pts, eps).reshape(-1, 6)
    center = p_t_batch(t, pts, spec, dim)
    around = p_t_batch(t, flows, spec, dim).reshape(n, 3, 2)
    Lp = (around.sum(axis=2) - 2 * center[:, None]).sum(axis=1) / eps ** 2
    dtp = (p_t_batch(t + dt, pts, spec, dim) - p_t_batch(t - dt, pts, spec, dim)) / (2 * dt)
    _check_floor(t, center, KERNEL_FLOOR)
    return np.abs(dtp - Lp) / center


def heat_residual(t: float, g, spec: QuadratureSpec | None = None, **kw) -> float:
    return float(heat_residual_batch(t, g, spec, **kw)[0])


def constants_W(spec: QuadratureSpec | None = None) -> tuple[float, float]:
    """``W1 = int |a| / sinh(|a|/2)`` and ``W2 = int |a|^2 coth(|a|/2) / sinh(|a|/2)`` over R^3."""
    spec = spec or QuadratureSpec()
    r, w = _gl(4 * spec.nodes_per_axis, 0.0, spec.truncation_radius)
    K = envelope_K(r)
    # r^3 / sinh(r/2) = 2 r^2 K and r^4 coth / sinh = 4 r^2 K c
    W1 = 4 * math.pi * float(np.sum(w * 2 * r * r * K))
    W2 = 4 * math.pi * float(np.sum(w * 4 * r * r * K * coth_factor(r)))
    return W1, W2
