"""Carre du champ ``Gamma`` and iterated ``Gamma_2`` for the sub-Laplacian.

Everything here is exact. ``gamma2`` is computed from its definition
``(L Gamma(f, f) - 2 Gamma(f, Lf)) / 2``; the two expanded forms
(:func:`gamma2_display` and :func:`gamma2_split_display`) are independent
algebraic rewritings that are checked against it.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .fields import X, Y, sublaplacian
from .polynomial import MultiPoly

HALF = Fraction(1, 2)


def _k(i: int) -> int:
    """Cyclic 1-based index."""
    return (i - 1) % 3 + 1


def gamma(f: MultiPoly, g: MultiPoly | None = None) -> MultiPoly:
    """``Gamma(f, g) = sum_i X_i f X_i g``."""
    if g is None:
        g = f
    out = f.zero_like()
    for i in (1, 2, 3):
        a = X(i)(f)
        if a:
            b = a if g is f else X(i)(g)
            out = out + a * b
    return out


def gamma_from_L(f: MultiPoly, g: MultiPoly) -> MultiPoly:
    """``(L(fg) - f Lg - g Lf) / 2``; independent route to :func:`gamma`."""
    return (sublaplacian(f * g) - f * sublaplacian(g) - g * sublaplacian(f)) * HALF


def gamma2(f: MultiPoly) -> MultiPoly:
    """Definitional ``Gamma_2(f, f)``."""
    Lf = sublaplacian(f)
    return (sublaplacian(gamma(f)) - gamma(f, Lf) * 2) * HALF


def gamma2_display(f: MultiPoly) -> MultiPoly:
    """Expanded form: sum (X_i X_j f)^2 - 2 sum X_i f (X_{i+1} Y_{i+2} f - Y_{i+1} X_{i+2} f)."""
    Xf = {i: X(i)(f) for i in (1, 2, 3)}
    out = f.zero_like()
    for i in (1, 2, 3):
        for j in (1, 2, 3):
            h = X(i)(Xf[j])
            out = out + h * h
    for i in (1, 2, 3):
        a, b = _k(i + 1), _k(i + 2)
        mixed = X(a)(Y(b)(f)) - Y(a)(Xf[b])
        out = out - Xf[i] * mixed * 2
    return out


def gamma2_split_display(f: MultiPoly) -> MultiPoly:
    """Form used for the Li-Yau bound: squares of X_i^2 f, Y_i f, symmetrized
    mixed second derivatives, plus the cross term."""
    Xf = {i: X(i)(f) for i in (1, 2, 3)}
    out = f.zero_like()
    for i in (1, 2, 3):
        a, b = _k(i + 1), _k(i + 2)
        xx = X(i)(Xf[i])
        yf = Y(i)(f)
        sym = (X(i)(Xf[a]) + X(a)(Xf[i])) * HALF
        out = out + xx * xx + yf * yf * HALF + sym * sym * 2
        out = out + (Xf[i] * X(b)(Y(a)(f)) - Xf[b] * X(i)(Y(a)(f))) * 2
    return out


def gamma2_forms_equal(f: MultiPoly) -> MultiPoly:
    """Residual between the two expanded forms; identically zero."""
    return gamma2_display(f) - gamma2_split_display(f)


def gamma2_lower_bound(f: MultiPoly, lam) -> MultiPoly:
    """Right side of the curvature bound:
    (Lf)^2 / 3 + sum (Y_i f)^2 / 2 - (4 / lam) Gamma(f) - lam sum Gamma(Y_i f)."""
    lam = Fraction(lam)
    if lam <= 0:
        raise ValueError("lambda must be positive")
    Lf = sublaplacian(f)
    out = Lf * Lf * Fraction(1, 3) - gamma(f) * (4 / lam)
    for i in (1, 2, 3):
        yf = Y(i)(f)
        out = out + yf * yf * HALF - gamma(yf) * lam
    return out


def jet2(f: MultiPoly, p: Sequence) -> tuple[Fraction, list, list]:
    """Exact value, gradient and Hessian of ``f`` at ``p`` in one pass over terms."""
    n = f.nvars
    val = Fraction(0)
    grad = [Fraction(0)] * n
    hess = [[Fraction(0)] * n for _ in range(n)]
    pw = [[1, p[k]] for k in range(n)]

    def power(k, m):
        row = pw[k]
        while len(row) <= m:
            row.append(row[-1] * p[k])
        return row[m]

    for e, c in f.terms():
        base = [power(k, m) for k, m in enumerate(e)]
        low = [power(k, m - 1) * m if m else 0 for k, m in enumerate(e)]
        prod_all = c
        for b in base:
            prod_all *= b
        val += prod_all
        active = [k for k, m in enumerate(e) if m]
        for a in active:
            t = c * low[a]
            for k in active:
                if k != a:
                    t *= base[k]
            grad[a] += t
            m = e[a]
            if m >= 2:
                t2 = c * power(a, m - 2) * m * (m - 1)
                for k in active:
                    if k != a:
                        t2 *= base[k]
                hess[a][a] += t2
            for b in active:
                if b <= a:
                    continue
                t3 = c * low[a] * low[b]
                for k in active:
                    if k != a and k != b:
                        t3 *= base[k]
                hess[a][b] += t3
                hess[b][a] += t3
    return val, grad, hess


def _horizontal_frame(p: Sequence) -> list[list]:
    """Coefficient vectors of X_1, X_2, X_3 at ``p`` (six entries each)."""
    x = p[0:3]
    rows = []
    for i in range(3):
        v = [0] * 6
        v[i] = 1
        v[3 + (i + 2) % 3] = -x[(i + 1) % 3] * HALF
        v[3 + (i + 1) % 3] = x[(i + 2) % 3] * HALF
        rows.append(v)
    return rows


def _frame_derivative(i: int, b: int) -> list:
    """``d/dcoord_b`` of the coefficient vector of X_{i+1} (constant)."""
    v = [0] * 6
    if b == (i + 1) % 3:
        v[3 + (i + 2) % 3] = -HALF
    if b == (i + 2) % 3:
        v[3 + (i + 1) % 3] = HALF
    return v


class PointJet:
    """Exact first and second horizontal/vertical derivatives of ``f`` at ``p``."""

    def __init__(self, f: MultiPoly, p: Sequence):
        self.value, g, H = jet2(f, p)
        frame = _horizontal_frame(p)
        self.X = [sum(v * gv for v, gv in zip(frame[i], g)) for i in range(3)]
        self.Y = g[3:6]
        # XX[i][j] = X_{i+1} X_{j+1} f,  XY[i][k] = X_{i+1} Y_{k+1} f
        self.XX = [[0] * 3 for _ in range(3)]
        for i in range(3):
            for j in range(3):
                s = 0
                for b in range(6):
                    wb = frame[i][b]
                    if not wb:
                        continue
                    dv = _frame_derivative(j, b)
                    s += wb * (sum(d * gv for d, gv in zip(dv, g))
                               + sum(v * H[a][b] for a, v in enumerate(frame[j]) if v))
                self.XX[i][j] = s
        self.XY = [[sum(frame[i][b] * H[b][3 + k] for b in range(6) if frame[i][b])
                    for k in range(3)] for i in range(3)]

    def L(self):
        return self.XX[0][0] + self.XX[1][1] + self.XX[2][2]

    def gamma(self):
        return sum(v * v for v in self.X)

    def gamma2(self):
        total = sum(h * h for row in self.XX for h in row)
        for i in range(3):
            a, b = (i + 1) % 3, (i + 2) % 3
            # Y_{a} X_{b} f = X_{b} Y_{a} f since [X, Y] = 0
            total -= 2 * self.X[i] * (self.XY[a][b] - self.XY[b][a])
        return total


def gamma2_lower_bound_gap(f: MultiPoly, lam, p: Sequence) -> Fraction:
    """``Gamma_2(f)(p)`` minus the curvature lower bound at ``p``; nonnegative."""
    lam = Fraction(lam)
    if lam <= 0:
        raise ValueError("lambda must be positive")
    J = PointJet(f, p)
    Lf = J.L()
    bound = Fraction(Lf * Lf, 3) - J.gamma() * 4 / lam
    for k in range(3):
        bound += J.Y[k] * J.Y[k] * HALF - lam * sum(J.XY[i][k] ** 2 for i in range(3))
    return Fraction(J.gamma2() - bound)


def gamma2_lower_bound_gap_poly(f: MultiPoly, lam, p: Sequence) -> Fraction:
    """Same gap through full polynomial arithmetic (slow cross-check)."""
    return gamma2(f).evaluate(p) - gamma2_lower_bound(f, lam).evaluate(p)


def gamma2_at(f: MultiPoly, p: Sequence) -> Fraction:
    """Exact ``Gamma_2(f)(p)``; needs only the 2-jet of ``f`` at ``p``."""
    return Fraction(PointJet(f, p).gamma2())
