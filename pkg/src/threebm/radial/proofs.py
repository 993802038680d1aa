"""Pointwise certificates that ``Gamma_2`` of a radial function is nonnegative.

Two independent routes. :func:`consistency_check` ties the six-dimensional
operators to the reduced ones, whose sum-of-squares form lives in
:mod:`.jets`. :func:`first_proof_certificate` works directly in the
horizontal frame, using the nine relations obtained by differentiating
``theta_i f = 0`` along ``X_j``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from ..algebra.carre import PointJet, gamma
from ..algebra.fields import sublaplacian
from ..algebra.polynomial import MultiPoly
from ..errors import DegenerateError
from .coords import RADIAL_NAMES, exact_radial_point, lift_radial
from .jets import gammahat, gammahat2_expanded, jet_of, lhat


def _as_six(f: MultiPoly) -> MultiPoly:
    return lift_radial(f) if f.names == RADIAL_NAMES else f


def _exact(g: Sequence) -> list[Fraction]:
    return [Fraction(v) for v in g]


def consistency_check(f: MultiPoly, g: Sequence) -> tuple[Fraction, Fraction, Fraction]:
    """Residuals ``L - Lhat``, ``Gamma - Gammahat``, ``Gamma_2 - Gammahat_2`` at ``g``."""
    g = _exact(g)
    F = lift_radial(f)
    p = exact_radial_point(g)
    j = jet_of(f, p)
    J = PointJet(F, g)
    return (
        sublaplacian(F).evaluate(g) - lhat(j, p),
        gamma(F).evaluate(g) - gammahat(j, j, p),
        Fraction(J.gamma2()) - gammahat2_expanded(j, p),
    )


def _cyc(v: Sequence):
    """1-based cyclic accessor."""
    return lambda i: v[(i - 1) % 3]


def nine_equations_residual(f: MultiPoly, g: Sequence) -> dict:
    """Residuals of ``theta_i f = 0`` written in the frame and of its nine
    ``X_j``-derivatives. All zero when ``f`` is radial.

    ``f`` is a polynomial in ``(r1, r2, z)`` or, to probe non-radial input,
    directly in the six coordinates.
    """
    g = _exact(g)
    J = PointJet(_as_six(f), g)
    x, y = _cyc(g[0:3]), _cyc(g[3:6])
    Xf, Yf = _cyc(J.X), _cyc(J.Y)

    def XX(a, b):
        # X_a X_b f, X_b applied first
        return J.XX[(a - 1) % 3][(b - 1) % 3]

    def XY(a, k):
        return J.XY[(a - 1) % 3][(k - 1) % 3]

    constraints, equations = [], []
    for i in (1, 2, 3):
        cy = ((i, -(x(i + 1) ** 2 + x(i + 2) ** 2) / 2),
              (i + 1, (x(i) * x(i + 1) - 2 * y(i + 2)) / 2),
              (i + 2, (x(i) * x(i + 2) + 2 * y(i + 1)) / 2))
        constraints.append(x(i + 1) * Xf(i + 2) - x(i + 2) * Xf(i + 1) + sum(c * Yf(k) for k, c in cy))

        def ylin(j):
            return sum(c * XY(j, k) for k, c in cy)

        equations.append(x(i + 1) * XX(i + 2, i) - x(i + 2) * XX(i + 1, i) + ylin(i))
        equations.append(Xf(i + 2) + x(i + 1) * XX(i + 2, i + 1) - x(i + 2) * XX(i + 1, i + 1) + ylin(i + 1))
        equations.append(-Xf(i + 1) + x(i + 1) * XX(i + 2, i + 2) - x(i + 2) * XX(i + 1, i + 2) + ylin(i + 2))
    return {"constraints": constraints, "equations": equations}


@dataclass(frozen=True)
class ProofFrame:
    """Auxiliary quantities at one point, indexed 1..3 cyclically."""

    alpha: tuple
    beta: tuple
    gamma: tuple
    eta: tuple
    xnorm2: tuple
    A: tuple

    @property
    def gamma_norm2(self):
        return sum(v * v for v in self.gamma)


def proof_frame(J: PointJet, g: Sequence) -> ProofFrame:
    x, y = _cyc(g[0:3]), _cyc(g[3:6])
    Xf = _cyc(J.X)

    def XX(a, b):
        return J.XX[(a - 1) % 3][(b - 1) % 3]

    gam = [x(i) * y(i + 1) - x(i + 1) * y(i) for i in (1, 2, 3)]
    # alpha_{i+1} and beta_{i+1} are defined from X_i, X_{i+1}; store by own index
    alpha, beta = [0] * 3, [0] * 3
    for i in (1, 2, 3):
        k = i % 3
        alpha[k] = x(i + 1) * Xf(i) - x(i) * Xf(i + 1)
        beta[k] = y(i + 1) * Xf(i) - y(i) * Xf(i + 1)
    eta = [x(i) * y(i) + x(i + 1) * y(i + 1) for i in (1, 2, 3)]
    xn = [x(i) ** 2 + x(i + 1) ** 2 for i in (1, 2, 3)]
    A = [gam[1] * XX(1, i + 1) + gam[2] * XX(2, i + 1) + gam[0] * XX(3, i + 1) for i in (1, 2, 3)]
    return ProofFrame(tuple(alpha), tuple(beta), tuple(gam), tuple(eta), tuple(xn), tuple(A))


@dataclass(frozen=True)
class Certificate:
    lhs: Fraction
    rhs: Fraction
    residual: Fraction
    squares: tuple
    closed_form_residuals: tuple

    def to_json(self) -> dict:
        s = lambda v: str(Fraction(v))  # noqa: E731
        return {"lhs": s(self.lhs), "rhs": s(self.rhs), "residual": s(self.residual),
                "squares": [s(v) for v in self.squares],
                "closed_form_residuals": [s(v) for v in self.closed_form_residuals]}


def _closed_forms(J: PointJet, g: Sequence, fr: ProofFrame) -> list:
    """Residuals of the solved expressions for ``X_i Y_{i+1} f`` and ``X_i Y_{i+2} f``."""
    x, y = _cyc(g[0:3]), _cyc(g[3:6])
    Xf, e, q = _cyc(J.X), _cyc(fr.eta), _cyc(fr.xnorm2)
    xn = sum(v * v for v in g[0:3])
    gg = fr.gamma_norm2

    def XX(a, b):
        return J.XX[(a - 1) % 3][(b - 1) % 3]

    out = []
    for i in (1, 2, 3):
        u = x(i + 2) * XX(i + 1, i) - x(i + 1) * XX(i + 2, i)
        v = x(i + 1) * XX(i, i) - x(i) * XX(i + 1, i) - Xf(i + 1)
        w = x(i) * XX(i + 2, i) - x(i + 2) * XX(i, i) + Xf(i + 2)
        c1 = -((x(i) * x(i + 1) * xn + 2 * y(i + 2) * q(i) - 2 * x(i + 2) * e(i) + 4 * y(i) * y(i + 1)) * u
               + (x(i + 1) * x(i + 2) * xn - 2 * y(i) * q(i + 1) + 2 * x(i) * e(i + 1) + 4 * y(i + 1) * y(i + 2)) * v
               + (x(i + 1) ** 2 * xn + 4 * y(i + 1) ** 2) * w) / (2 * gg)
        c2 = -((x(i) * x(i + 2) * xn - 2 * y(i + 1) * q(i + 2) + 2 * x(i + 1) * e(i + 2) + 4 * y(i + 2) * y(i)) * u
               + (x(i + 1) * x(i + 2) * xn + 2 * y(i) * q(i + 1) - 2 * x(i) * e(i + 1) + 4 * y(i + 1) * y(i + 2)) * w
               + (x(i + 2) ** 2 * xn + 4 * y(i + 2) ** 2) * v) / (2 * gg)
        out.append(J.XY[i - 1][i % 3] - c1)
        out.append(J.XY[i - 1][(i + 1) % 3] - c2)
    return out


def first_proof_certificate(f: MultiPoly, g: Sequence) -> Certificate:
    """``|gamma|^2 Gamma_2(f)`` against its explicit sum of twelve squares.

    Raises :class:`DegenerateError` when ``x`` and ``y`` are parallel.
    """
    g = _exact(g)
    J = PointJet(_as_six(f), g)
    fr = proof_frame(J, g)
    gg = fr.gamma_norm2
    if gg == 0:
        raise DegenerateError("|gamma|^2 = 0: x and y are parallel")
    x = _cyc(g[0:3])
    al, be, ga, A = _cyc(fr.alpha), _cyc(fr.beta), _cyc(fr.gamma), _cyc(fr.A)

    def XX(a, b):
        return J.XX[(a - 1) % 3][(b - 1) % 3]

    squares = [(2 * be(i) - A(i)) ** 2 for i in (1, 2, 3)]
    for i in (1, 2, 3):
        for j in (1, 2, 3):
            t = ga(i + j) * XX(i + j, i + 1) - ga(i + j + 1) * XX(i + j + 2, i + 1) - al(i) * x(i + j + 1)
            squares.append(t * t)
    lhs = Fraction(gg * J.gamma2())
    rhs = Fraction(sum(squares))
    return Certificate(lhs, rhs, lhs - rhs, tuple(squares), tuple(_closed_forms(J, g, fr)))
