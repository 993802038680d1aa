"""``P_t f(g) = E f(g o G_t)`` and its horizontal derivatives by Monte Carlo.

``X_i P_t f(g)`` is the derivative of ``eps -> P_t f(g o (eps e_i, 0))``. It
is taken by central differences with common random numbers, so the per-path
quotient has bounded variance as ``eps -> 0``; the step is halved until the
change is below the statistical error.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..algebra.group import multiply_array
from ..algebra.polynomial import MultiPoly
from ..sampler import SampleBatch, SimConfig, simulate

# one path may not carry more than this share of the squared deviations
DOMINANCE_LIMIT = 0.05


def as_callable(f) -> Callable[[np.ndarray], np.ndarray]:
    """Vectorized evaluator for a polynomial or a callable on (n, 6) arrays."""
    if isinstance(f, MultiPoly):
        return f.evaluate_array
    return f


def dominated(psi: np.ndarray) -> bool:
    """True when a handful of paths dominate the variance (or a value is not finite)."""
    if not np.all(np.isfinite(psi)):
        return True
    d = psi - psi.mean()
    s = float((d * d).sum())
    return s > 0 and float((d * d).max()) / s > DOMINANCE_LIMIT


def stderr_of(psi: np.ndarray) -> float:
    """Standard error of a mean whose influence values are ``psi``."""
    return float(psi.std(ddof=1) / math.sqrt(len(psi)))


@dataclass
class SemigroupValue:
    """``P_t f(g)`` and optionally ``X_i P_t f(g)``.

    ``values`` (n,) and ``dvalues`` (n, 3) are the per-path terms, kept for
    delta-method errors of derived quantities.
    """

    value: float
    stderr: float
    values: np.ndarray
    grad: np.ndarray | None = None
    grad_stderr: np.ndarray | None = None
    dvalues: np.ndarray | None = None
    eps: float | None = None
    fd_change: float | None = None
    flagged: bool = False


def terminal_points(t: float, cfg: SimConfig | None = None, batch: SampleBatch | None = None) -> np.ndarray:
    if batch is not None:
        if abs(batch.config.t - t) > 1e-12 * t:
            raise ValueError("batch was simulated at a different time")
        return batch.terminal
    if cfg is None:
        raise ValueError("need a SimConfig or a SampleBatch")
    return simulate(cfg.with_(t=t)).terminal


def _fd(F, g: np.ndarray, G: np.ndarray, eps: float) -> np.ndarray:
    out = np.empty((len(G), 3))
    for i in range(3):
        e = np.zeros(6)
        e[i] = eps
        plus = multiply_array(multiply_array(g, e), G)
        minus = multiply_array(multiply_array(g, -e), G)
        out[:, i] = (F(plus) - F(minus)) / (2 * eps)
    return out


def semigroup_apply(f, t: float, g=None, cfg: SimConfig | None = None, batch: SampleBatch | None = None,
                    derivatives: bool = False, eps: float | None = None, halvings: int = 6) -> SemigroupValue:
    """Monte Carlo ``P_t f(g)`` with standard error.

    Parameters
    ----------
    f : MultiPoly or callable
        Evaluated on arrays of shape (n, 6).
    g : array_like, optional
        Base point; the identity by default.
    cfg, batch
        Either a simulation config (run at time ``t``) or a ready batch.
    derivatives : bool
        Also estimate ``X_i P_t f(g)``.
    eps : float, optional
        Initial difference step, default ``1e-3 sqrt(t)``.
    """
    F = as_callable(f)
    g = np.zeros(6) if g is None else np.asarray(g, dtype=float)
    G = terminal_points(t, cfg, batch)
    vals = np.asarray(F(multiply_array(g, G)), dtype=float)
    out = SemigroupValue(float(vals.mean()), stderr_of(vals), vals, flagged=dominated(vals))
    if not derivatives:
        return out
    eps = 1e-3 * math.sqrt(t) if eps is None else eps
    D = _fd(F, g, G, eps)
    change = math.inf
    for _ in range(halvings):
        D2 = _fd(F, g, G, eps / 2)
        change = float(np.max(np.abs(D2.mean(0) - D.mean(0))))
        se = max(stderr_of(D2[:, i]) for i in range(3))
        D, eps = D2, eps / 2
        if change <= max(se, 1e-12 * (1 + float(np.abs(D.mean(0)).max()))):
            break
    out.grad = D.mean(0)
    out.grad_stderr = np.array([stderr_of(D[:, i]) for i in range(3)])
    out.dvalues = D
    out.eps = eps
    out.fd_change = change
    out.flagged = out.flagged or any(dominated(D[:, i]) for i in range(3) if np.ptp(D[:, i]) > 0)
    return out
