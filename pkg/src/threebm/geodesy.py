"""Carnot-Caratheodory distance by normal-geodesic shooting, with brackets.

With covector ``(p, eta)`` the horizontal momentum is ``h = p + (eta x x)/2``
and ``H = |h|^2 / 2``. Along the flow ``eta`` is constant, ``h`` rotates,
``dh/ds = eta x h``, ``dx/ds = h`` and ``dy/ds = (x x dx/ds) / 2``. The
distance only depends on ``(r1, r2, z)`` and is homogeneous, so shooting runs
on a canonical representative scaled to unit gauge.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import optimize

from .algebra.group import Point6
from .errors import NonConvergenceError
from .radial.coords import canonical_point, radial_coords

MIN_RESTARTS = 64
# initial rotation levels |eta| are spread over (0, START_ROTATION]
START_ROTATION = 3 * math.pi
# shooting residual accepted at unit gauge, and the tie width between solutions
SOLVE_TOL = 1e-10
TIE_TOL = 1e-9
H_DRIFT_TOL = 1e-8

_GL_X, _GL_W = np.polynomial.legendre.leggauss(48)
_GL_S = 0.5 * (_GL_X + 1.0)
_GL_W = 0.5 * _GL_W


@dataclass(frozen=True)
class CotangentState:
    """A point ``q`` with covector ``xi = (p, eta)``."""

    q: np.ndarray
    xi: np.ndarray

    @property
    def horizontal(self) -> np.ndarray:
        return self.xi[:3] + 0.5 * np.cross(self.xi[3:], self.q[:3])

    def hamiltonian(self) -> float:
        h = self.horizontal
        return 0.5 * float(h @ h)


@dataclass(frozen=True)
class Flow:
    endpoint: Point6
    length: float
    h_drift: float
    steps: int


def _rhs(state: np.ndarray, eta: np.ndarray) -> np.ndarray:
    x, h = state[:3], state[6:]
    return np.concatenate([h, 0.5 * np.cross(x, h), np.cross(eta, h)])


def exp_map(xi0, T: float = 1.0, steps: int | None = None) -> Flow:
    """Endpoint at time ``T`` of the normal geodesic leaving the origin with covector ``xi0``.

    Fixed-step RK4 in ``(x, y, h)``. The relative drift of ``H`` per unit
    time is checked against ``1e-8``.

    Raises
    ------
    NonConvergenceError
        If the drift is larger, i.e. the step is too coarse for ``|eta|``.
    """
    xi0 = np.asarray(xi0, dtype=float)
    if T <= 0:
        raise ValueError("T must be positive")
    eta = xi0[3:]
    state = np.concatenate([np.zeros(6), xi0[:3]])
    if steps is None:
        steps = int(math.ceil(400 * T * max(1.0, float(np.linalg.norm(eta)))))
    dt = T / steps
    H0 = 0.5 * float(xi0[:3] @ xi0[:3])
    for _ in range(steps):
        k1 = _rhs(state, eta)
        k2 = _rhs(state + 0.5 * dt * k1, eta)
        k3 = _rhs(state + 0.5 * dt * k2, eta)
        k4 = _rhs(state + dt * k3, eta)
        state = state + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    H1 = 0.5 * float(state[6:] @ state[6:])
    drift = abs(H1 - H0) / H0 / T if H0 > 0 else 0.0
    if drift > H_DRIFT_TOL:
        raise NonConvergenceError(f"H drift {drift:.2e} per unit time; use more steps",
                                  {"drift": drift, "steps": steps})
    return Flow(Point6(*state[:6]), T * math.sqrt(2 * H0), drift, steps)


def _sinc(a):
    # sin(a)/a
    return np.sinc(np.asarray(a) / math.pi)


def _cubic(w, s):
    """``(w s - sin(w s)) / w^3``, stable at small ``w``."""
    a = w * s
    small = np.abs(a) < 1e-2
    safe = np.where(small, 1.0, w)
    big = (a - np.sin(a)) / np.where(small, 1.0, safe ** 3)
    return np.where(small, s ** 3 / 6 * (1 - a * a / 20), big)


def endpoint_batch(h0: np.ndarray, eta: np.ndarray, T: float = 1.0) -> np.ndarray:
    """Closed-form endpoints for rows of ``h0`` and ``eta``, shape (B, 6).

    ``h`` is rotated by Rodrigues' formula, ``x`` is its exact integral and
    ``y`` uses 48-point Gauss-Legendre in time.
    """
    h0 = np.atleast_2d(np.asarray(h0, dtype=float))[:, None, :]
    eta = np.atleast_2d(np.asarray(eta, dtype=float))[:, None, :]
    w = np.linalg.norm(eta, axis=-1, keepdims=True)
    s = T * np.append(_GL_S, 1.0)[None, :, None]
    a = np.cross(eta, h0)
    b = np.cross(eta, a)
    half = 0.5 * s * s * _sinc(0.5 * w * s) ** 2
    h = h0 + s * _sinc(w * s) * a + half * b
    x = h0 * s + half * a + _cubic(w, s) * b
    y = 0.5 * T * np.einsum("k,bkj->bj", _GL_W, np.cross(x[:, :-1], h[:, :-1]))
    return np.concatenate([x[:, -1], y], axis=1)


def endpoint(h0, eta, T: float = 1.0) -> np.ndarray:
    """Endpoint of the flow from the origin, without time stepping."""
    return endpoint_batch(h0, eta, T)[0]


def linear_part(eta, T: float = 1.0) -> np.ndarray:
    """Matrix ``M`` with ``x(T) = M h0`` for fixed ``eta``."""
    return np.stack([endpoint(e, eta, T)[:3] for e in np.eye(3)], axis=1)


# bounds ------------------------------------------------------------------

def _mu(phi: float) -> float:
    return (phi - math.sin(phi)) / (8 * math.sin(phi / 2) ** 2)


def heisenberg_distance(rho: float, h: float) -> float:
    """Distance to ``(rho, h)`` in the Heisenberg group with area ``y = (x dx' - x' dx)/2``.

    The minimizer is a circular arc turning by ``phi``, with
    ``h / rho^2 = (phi - sin phi) / (8 sin^2(phi/2))``.
    """
    rho, h = abs(rho), abs(h)
    if h == 0.0:
        return rho
    if rho == 0.0:
        return math.sqrt(4 * math.pi * h)
    target = h / (rho * rho)
    # mu is increasing on (0, 2 pi) with mu ~ phi / 12 near 0
    lo, hi = 1e-4, 2 * math.pi - 1e-12
    if target <= _mu(lo):
        phi = 12 * target
    elif target >= _mu(hi):
        return math.sqrt(4 * math.pi * h)
    else:
        phi = optimize.brentq(lambda p: _mu(p) - target, lo, hi, xtol=1e-15, rtol=1e-15)
    if phi < 1.0:
        return rho * phi / (2 * math.sin(phi / 2)) if phi > 0 else rho
    return phi * math.sqrt(2 * h / (phi - math.sin(phi)))


def _fibonacci_sphere(n: int) -> np.ndarray:
    k = np.arange(n) + 0.5
    polar = np.arccos(1 - 2 * k / n)
    az = math.pi * (1 + 5 ** 0.5) * k
    return np.stack([np.cos(az) * np.sin(polar), np.sin(az) * np.sin(polar), np.cos(polar)], axis=1)


_PROJECTION_DIRS = _fibonacci_sphere(200)


@dataclass(frozen=True)
class Bounds:
    lower: float
    upper: float
    lower_source: str
    upper_source: str


def distance_bounds(g) -> Bounds:
    """Rigorous ``lower <= d(g) <= upper``.

    Lower: ``|x|``, and for every unit ``n`` the map
    ``g -> (x - (x.n) n, y.n)`` onto the Heisenberg group shortens lengths,
    so ``d(g) >= d_H(|x_perp|, |y.n|)``. Directions tried are the axes,
    ``y/|y|`` and a fixed spherical design.

    Upper: the shorter of two explicit paths. (a) The segment to ``(x, 0)``
    and a planar circle of area ``|y|`` normal to ``y``. (b) Half the
    component of ``x`` along ``y``, a Heisenberg geodesic in the plane normal
    to ``y`` and the other half; the two half segments cancel each other's
    area, so the length is ``|x_par| + d_H(|x_perp|, |y|)``.
    """
    g = np.asarray(g, dtype=float)
    x, y = g[:3], g[3:]
    nx, ny = float(np.linalg.norm(x)), float(np.linalg.norm(y))
    lower, lsrc = nx, "|x|"
    dirs = [("axis", e) for e in np.eye(3)]
    if ny > 0:
        dirs.append(("y-hat", y / ny))
    dirs += [("design", e) for e in _PROJECTION_DIRS]
    for name, n in dirs:
        xp = x - (x @ n) * n
        v = heisenberg_distance(float(np.linalg.norm(xp)), float(y @ n))
        if v > lower:
            lower, lsrc = v, name
    upper, usrc = nx + math.sqrt(4 * math.pi * ny), "segment+circle"
    if ny > 0:
        par = abs(float(x @ y)) / ny
        xperp = math.sqrt(max(nx * nx - par * par, 0.0))
        alt = par + heisenberg_distance(xperp, ny)
        if alt < upper:
            upper, usrc = alt, "split-segment+arc"
    # floating noise must never break the ordering
    upper = max(upper, lower)
    return Bounds(lower, upper, lsrc, usrc)


def component_loop_upper(g) -> float:
    """``|x| + sum_i sqrt(4 pi |y_i|)``: segment, then one planar loop per component."""
    g = np.asarray(g, dtype=float)
    return float(np.linalg.norm(g[:3]) + np.sqrt(4 * math.pi * np.abs(g[3:])).sum())


# shooting ----------------------------------------------------------------

@dataclass
class DistanceResult:
    d: float
    lower: float
    upper: float
    status: str
    converged: int
    agreeing: int
    restarts: int
    covector: list = field(default_factory=list)
    # shortest converged length before clamping into [lower, upper]
    shot: float | None = None

    def to_json(self) -> dict:
        return asdict(self)


def gauge(g) -> float:
    g = np.asarray(g, dtype=float)
    return float((np.sum(g[:3] ** 2) ** 2 + np.sum(g[3:] ** 2)) ** 0.25)


def _starts(target: np.ndarray, restarts: int, seed: int) -> list[np.ndarray]:
    """Stratified initial covectors: directions of ``eta`` on a spherical
    design times rotation levels in ``(0, START_ROTATION]``."""
    rng = np.random.default_rng(seed)
    levels = max(1, restarts // 16)
    dirs = _fibonacci_sphere(int(math.ceil(restarts / levels)))
    mags = START_ROTATION * (np.arange(levels) + 0.5) / levels
    x, y = target[:3], target[3:]
    scale = math.sqrt(4 * math.pi * float(np.linalg.norm(y)))
    out = []
    for m in mags:
        for d in dirs:
            eta = m * d
            h0 = np.linalg.lstsq(linear_part(eta), x, rcond=None)[0]
            u = rng.standard_normal(3)
            u -= (u @ d) * d
            h0 = h0 + 0.5 * scale * u / max(np.linalg.norm(u), 1e-300)
            out.append(np.concatenate([h0, eta]))
            if len(out) == restarts:
                return out
    return out


_FD_STEP = 1e-6


def _jacobian(v: np.ndarray) -> np.ndarray:
    # central differences, all twelve evaluations in one batch
    E = np.eye(6) * _FD_STEP * np.maximum(1.0, np.abs(v))
    V = np.concatenate([v + E, v - E])
    F = endpoint_batch(V[:, :3], V[:, 3:])
    return ((F[:6] - F[6:]) / (2 * np.diag(E))[:, None]).T


def _solve(start: np.ndarray, target: np.ndarray):
    res = optimize.least_squares(lambda v: endpoint(v[:3], v[3:]) - target, start, jac=lambda v: _jacobian(v),
                                 xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=400)
    err = float(np.linalg.norm(res.fun))
    return res.x, err


def cc_distance(g, restarts: int = MIN_RESTARTS, seed: int = 0, threads: int = 1) -> DistanceResult:
    """Distance from the origin to ``g``.

    The point is replaced by its canonical representative at unit gauge.
    Each restart solves ``endpoint(h0, eta) = target`` by nonlinear least
    squares; the shortest converged ``|h0|`` wins. ``status`` is ``"ok"``,
    ``"bounds"`` (the brackets meet), or ``"degraded"`` when no restart
    converged or the answer left the brackets; then ``d`` is the upper bound.
    ``covector`` is for the unit-gauge canonical target.
    """
    if restarts < 1:
        raise ValueError("restarts must be positive")
    g = np.asarray(g, dtype=float)
    lam = gauge(g)
    if lam == 0.0:
        return DistanceResult(0.0, 0.0, 0.0, "bounds", 0, 0, 0)
    scaled = np.concatenate([g[:3] / lam, g[3:] / lam ** 2])
    target = np.asarray(canonical_point(radial_coords(scaled)), dtype=float)
    b = distance_bounds(target)
    if b.upper - b.lower <= 1e-13 * b.upper:
        return DistanceResult(lam * b.upper, lam * b.lower, lam * b.upper, "bounds", 0, 0, 0)

    starts = _starts(target, restarts, seed)
    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            sols = list(ex.map(lambda s: _solve(s, target), starts))
    else:
        sols = [_solve(s, target) for s in starts]
    # every converged normal geodesic is an admissible path, so the minimum
    # over all of them is used, whatever its rotation
    lengths = sorted((float(np.linalg.norm(v[:3])), list(v)) for v, err in sols if err < SOLVE_TOL)
    slack = 1e-9 * b.upper
    if not lengths:
        return DistanceResult(lam * b.upper, lam * b.lower, lam * b.upper, "degraded", 0, 0, restarts)
    d, cov = lengths[0]
    shot = lam * d
    agree = sum(1 for L, _ in lengths if L - d <= TIE_TOL)
    status = "ok" if b.lower - slack <= d <= b.upper + slack else "degraded"
    if status == "degraded":
        d = b.upper
    d = min(max(d, b.lower), b.upper)
    return DistanceResult(lam * d, lam * b.lower, lam * b.upper, status, len(lengths), agree, restarts, cov,
                          shot)
