"""Heat kernel at time ``t`` evaluated with ``t`` inside the integrand.

With ``s = 2t`` and ``b`` the dual variable in unscaled units,

    p_t(x, y) = (2 pi)^3 s^(-3/2) PREFACTOR int cos(y.b) K(s|b|)
                exp(-(c(s|b|) (|x|^2 - (x.b~)^2) + (x.b~)^2) / (2 s)) db.

This route never uses the dilation structure, and its radial nodes are not
the image of the nodes used by :func:`threebm.kernel.heat.p_t_batch`, so
comparing the two tests the scaling law rather than restating it.
"""
from __future__ import annotations

import math

import numpy as np
from scipy.special import j0

from .heat import RAW_MASS, RAW_TIME, _flow_points, _points
from .quadrature import PREFACTOR, _chunks, _frames, _gl, coth_factor, envelope_K

# truncation of s|b| and node counts; chosen unlike the default QuadratureSpec
DIRECT_RADIUS = 90.0
DIRECT_NODES = 360
DIRECT_ANGULAR = 80
# |y| / s beyond which nodes are doubled, once per factor of two
DIRECT_RESOLVED_Y = 1.0
DIRECT_MAX_LEVEL = 3


def _values(t: float, x: np.ndarray, y: np.ndarray, level: int) -> np.ndarray:
    s = t / RAW_TIME
    k = 2 ** level
    r, wr = _gl(k * DIRECT_NODES, 0.0, DIRECT_RADIUS / s)
    psi, wp = _gl(k * DIRECT_ANGULAR, 0.0, math.pi)
    K, c = envelope_K(s * r), coth_factor(s * r)
    mu, sn = np.cos(psi), np.sin(psi)
    base = (wr * r * r * K)[:, None] * (wp * sn)[None, :] * 2 * math.pi
    xn, _, ypar, yperp, _ = _frames(x, y)
    out = np.empty(len(x))
    R = r[:, None]
    for sl in _chunks(len(x), r.size * mu.size):
        xn2 = (xn[sl] ** 2)[:, None, None] / s
        expo = np.exp(-0.5 * xn2 * (c[None, :, None] * sn[None, None, :] ** 2 + mu[None, None, :] ** 2))
        a = R[None] * mu[None, None, :] * ypar[sl, None, None]
        b = R[None] * sn[None, None, :] * yperp[sl, None, None]
        out[sl] = (base[None] * expo * np.cos(a) * j0(b)).sum(axis=(1, 2))
    return out


def p_t_direct_batch(t: float, g) -> np.ndarray:
    """``p_t`` at each row of ``g`` by the direct-time quadrature."""
    if t <= 0:
        raise ValueError("t must be positive")
    pts = _points(g)
    x, y = pts[:, :3], pts[:, 3:]
    s = t / RAW_TIME
    yn = np.linalg.norm(y, axis=1) / s
    lev = np.ceil(np.log2(np.maximum(yn, DIRECT_RESOLVED_Y) / DIRECT_RESOLVED_Y)).astype(int)
    out = np.zeros(len(pts))
    for L in np.unique(lev[lev <= DIRECT_MAX_LEVEL]):
        idx = np.flatnonzero(lev == L)
        out[idx] = _values(t, x[idx], y[idx], int(L))
    return s ** -1.5 / RAW_MASS * PREFACTOR * out


def horiz_grad_log_direct(t: float, g, eps: float | None = None) -> np.ndarray:
    """``sqrt(Gamma(log p_t))`` by central differences along the flows of
    ``X_i`` on the direct-time kernel; step ``1e-4 sqrt(t)`` by default."""
    pts = _points(g)
    eps = 1e-4 * math.sqrt(t) if eps is None else eps
    n = len(pts)
    center = p_t_direct_batch(t, pts)
    around = p_t_direct_batch(t, _flow_points(pts, eps).reshape(-1, 6)).reshape(n, 3, 2)
    D = (around[:, :, 0] - around[:, :, 1]) / (2 * eps)
    return np.linalg.norm(D, axis=1) / center
