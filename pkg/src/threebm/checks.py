"""Exact identity suites behind ``algebra check`` and ``radial check``.

Each check returns a :class:`CheckResult`; a suite is a list of them. Random
inputs are drawn from a seeded generator with small integer coefficients and
rational points, so every comparison is an exact equality.
"""
from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .algebra.carre import gamma, gamma2, gamma2_display, gamma2_lower_bound_gap, gamma2_split_display, gamma2_at
from .algebra.commutant import commutant_basis, same_span, stock_commutant
from .algebra.fields import (X, Xhat, Y, commutator, dilation_field, lie_bracket, sublaplacian,
                             sublaplacian_op, theta)
from .algebra.polynomial import COORDS, MultiPoly, monomials
from .radial.coords import RADIAL_NAMES, exact_radial_point, lift_radial
from .radial.jets import (gammahat2_expanded, gammahat2_formal_residual, gammahat2_r1_only, gammahat2_sos,
                          jet_of, sos_minus_expanded_cleared)
from .radial.proofs import consistency_check, first_proof_certificate, nine_equations_residual


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0

    def to_json(self) -> dict:
        return asdict(self)


def _timed(name: str, fn: Callable[[], tuple[bool, dict]]) -> CheckResult:
    t0 = time.perf_counter()
    ok, detail = fn()
    return CheckResult(name, bool(ok), detail, time.perf_counter() - t0)


def _k(i: int) -> int:
    return (i - 1) % 3 + 1


# random inputs -----------------------------------------------------------

def random_poly(rng: np.random.Generator, max_degree: int = 3, n_terms: int = 6,
                names: tuple = COORDS) -> MultiPoly:
    """Sparse polynomial with integer coefficients in [-5, 5]."""
    pool = monomials(len(names), max_degree)
    idx = rng.choice(len(pool), size=min(n_terms, len(pool)), replace=False)
    terms = {pool[i]: int(rng.integers(1, 6)) * int(rng.choice([-1, 1])) for i in idx}
    return MultiPoly(terms, names)


def random_rational(rng: np.random.Generator, n: int, lo: int = -2, hi: int = 2, den: int = 4) -> list[Fraction]:
    """Rationals ``k / den`` in ``[lo, hi]``."""
    return [Fraction(int(v), den) for v in rng.integers(lo * den, hi * den + 1, size=n)]


# algebra -----------------------------------------------------------------

def check_brackets() -> CheckResult:
    def run():
        bad = []
        zero = lambda V: V.is_zero()  # noqa: E731
        for i in (1, 2, 3):
            if lie_bracket(X(i), X(_k(i + 1))) != Y(_k(i + 2)):
                bad.append(f"[X{i},X{_k(i + 1)}]")
            for j in (1, 2, 3):
                if not zero(lie_bracket(X(i), Y(j))):
                    bad.append(f"[X{i},Y{j}]")
                if not zero(lie_bracket(Y(i), Y(j))):
                    bad.append(f"[Y{i},Y{j}]")
                if not zero(lie_bracket(X(i), Xhat(j))):
                    bad.append(f"[X{i},Xhat{j}]")
            if lie_bracket(theta(i), theta(_k(i + 1))) != theta(_k(i + 2)):
                bad.append(f"[theta{i},theta{_k(i + 1)}]")
        return not bad, {"failures": bad}
    return _timed("bracket table", run)


def check_L_commutators() -> CheckResult:
    def run():
        L = sublaplacian_op()
        bad = []
        for i in (1, 2, 3):
            if not commutator(L, theta(i).as_diffop()).is_zero():
                bad.append(f"[L,theta{i}]")
            if not commutator(L, Xhat(i).as_diffop()).is_zero():
                bad.append(f"[L,Xhat{i}]")
        if commutator(L, dilation_field().as_diffop()) != L:
            bad.append("[L,D] != L")
        return not bad, {"failures": bad}
    return _timed("sub-Laplacian commutators", run)


def check_radial_tables() -> CheckResult:
    def run():
        x1, x2, x3, y1, y2, y3 = MultiPoly.gens(COORDS)
        r1 = x1 * x1 + x2 * x2 + x3 * x3
        r2 = y1 * y1 + y2 * y2 + y3 * y3
        z = x1 * y1 + x2 * y2 + x3 * y3
        zero = MultiPoly(names=COORDS)
        table = {
            "L r1 = 6": (sublaplacian(r1), MultiPoly.constant(6)),
            "L r2 = r1": (sublaplacian(r2), r1),
            "L z = 0": (sublaplacian(z), zero),
            "G(r1,r1) = 4 r1": (gamma(r1), r1 * 4),
            "G(r2,r2) = r1 r2 - z^2": (gamma(r2), r1 * r2 - z * z),
            "G(z,z) = r2": (gamma(z), r2),
            "G(r1,z) = 2z": (gamma(r1, z), z * 2),
            "G(r1,r2) = 0": (gamma(r1, r2), zero),
            "G(r2,z) = 0": (gamma(r2, z), zero),
        }
        bad = [k for k, (a, b) in table.items() if a != b]
        return not bad, {"failures": bad, "checked": list(table)}
    return _timed("L and Gamma tables on (r1, r2, z)", run)


def check_gamma2_displays(n: int = 20, seed: int = 0) -> CheckResult:
    def run():
        rng = np.random.default_rng(seed)
        bad = 0
        for _ in range(n):
            f = random_poly(rng, 3, 5)
            g2 = gamma2(f)
            if g2 != gamma2_display(f) or g2 != gamma2_split_display(f):
                bad += 1
        return bad == 0, {"n": n, "mismatches": bad}
    return _timed("Gamma_2 displays", run)


def check_curvature_gap(n: int = 10_000, seed: int = 0) -> CheckResult:
    """Gap of the curvature inequality on ``n`` random (f, lambda, point) triples."""
    def run():
        rng = np.random.default_rng(seed)
        lams = (Fraction(1, 4), Fraction(1), Fraction(4))
        polys = [random_poly(rng, 3, 6) for _ in range(max(1, n // 20))]
        worst, bad = None, 0
        for k in range(n):
            f = polys[k % len(polys)]
            lam = lams[int(rng.integers(3))]
            gap = gamma2_lower_bound_gap(f, lam, random_rational(rng, 6))
            worst = gap if worst is None or gap < worst else worst
            bad += gap < 0
        return bad == 0, {"n": n, "negative": int(bad), "min_gap": str(worst)}
    return _timed("curvature inequality gap", run)


def check_commutant(degrees=(2, 3, 4)) -> CheckResult:
    def run():
        stock = stock_commutant()
        out = {}
        for d in degrees:
            basis = commutant_basis(d)
            out[d] = {"dimension": len(basis), "same_span": same_span(basis, stock)}
        ok = all(v["dimension"] == 9 and v["same_span"] for v in out.values())
        return ok, {str(k): v for k, v in out.items()}
    return _timed("commutant dimension", run)


def algebra_suite(n_gap: int = 10_000, seed: int = 0, degrees=(2, 3, 4)) -> list[CheckResult]:
    return [check_brackets(), check_L_commutators(), check_radial_tables(), check_gamma2_displays(seed=seed),
            check_curvature_gap(n_gap, seed), check_commutant(degrees)]


# radial ------------------------------------------------------------------

def random_radial_poly(rng: np.random.Generator, max_degree: int = 2, n_terms: int = 4) -> MultiPoly:
    return random_poly(rng, max_degree, n_terms, RADIAL_NAMES)


def check_formal_identities() -> CheckResult:
    def run():
        g, expected = gammahat2_r1_only()
        res = {"formal residual": gammahat2_formal_residual().is_zero(),
               "r1^2 (SOS - expanded)": sos_minus_expanded_cleared().is_zero(),
               "r1-only reduction": g == expected}
        return all(res.values()), res
    return _timed("reduced Gamma_2 identities", run)


def _nondegenerate_point(rng) -> list[Fraction]:
    while True:
        g = random_rational(rng, 6)
        p = exact_radial_point(g)
        if p.r1 > 0 and p.r1 * p.r2 - p.z * p.z > 0:
            return g


def check_reduction(n: int = 1000, seed: int = 1) -> CheckResult:
    """``L``, ``Gamma``, ``Gamma_2`` of lifted radial polynomials against the reduced operators."""
    def run():
        rng = np.random.default_rng(seed)
        polys = [random_radial_poly(rng) for _ in range(max(1, n // 20))]
        bad = 0
        for k in range(n):
            res = consistency_check(polys[k % len(polys)], random_rational(rng, 6))
            bad += any(r != 0 for r in res)
        return bad == 0, {"n": n, "nonzero": bad}
    return _timed("full-space vs reduced operators", run)


def check_first_proof(n: int = 1000, seed: int = 2) -> CheckResult:
    def run():
        rng = np.random.default_rng(seed)
        polys = [random_radial_poly(rng) for _ in range(max(1, n // 20))]
        bad, nine_bad = 0, 0
        for k in range(n):
            f, g = polys[k % len(polys)], _nondegenerate_point(rng)
            cert = first_proof_certificate(f, g)
            bad += cert.residual != 0 or any(r != 0 for r in cert.closed_form_residuals)
            if k < n // 10:
                nine = nine_equations_residual(f, g)
                nine_bad += any(r != 0 for r in nine["constraints"] + nine["equations"])
        return bad == 0 and nine_bad == 0, {"n": n, "nonzero_certificates": bad, "nine_equation_failures": nine_bad}
    return _timed("sum of twelve squares certificate", run)


def check_nonnegativity(n: int = 10_000, seed: int = 3) -> CheckResult:
    """``Gamma_2(lift f) >= 0`` and agreement of the two proofs where both apply."""
    def run():
        rng = np.random.default_rng(seed)
        polys = [lift_radial(p) for p in (random_radial_poly(rng) for _ in range(max(1, n // 50)))]
        neg, disagree, worst = 0, 0, None
        for k in range(n):
            F, g = polys[k % len(polys)], random_rational(rng, 6)
            v = gamma2_at(F, g)
            neg += v < 0
            worst = v if worst is None or v < worst else worst
        return neg == 0, {"n": n, "negative": int(neg), "min": str(worst)}
    return _timed("Gamma_2 of radial functions is nonnegative", run)


def check_both_proofs(n: int = 200, seed: int = 4) -> CheckResult:
    """Reduced SOS value and the twelve-square certificate give the same ``Gamma_2``."""
    def run():
        rng = np.random.default_rng(seed)
        bad = 0
        for _ in range(n):
            f, g = random_radial_poly(rng), _nondegenerate_point(rng)
            p = exact_radial_point(g)
            j = jet_of(f, p)
            sos, terms = gammahat2_sos(j, p)
            cert = first_proof_certificate(f, g)
            gg = sum(v * v for v in _cross(g[0:3], g[3:6]))
            bad += sos != gammahat2_expanded(j, p) or cert.lhs != gg * sos or any(t < 0 for t in terms)
        return bad == 0, {"n": n, "disagreements": bad}
    return _timed("both proofs agree", run)


def _cross(a, b):
    return [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]


def radial_suite(n_pairs: int = 1000, n_points: int = 10_000, seed: int = 0) -> list[CheckResult]:
    return [check_formal_identities(), check_reduction(n_pairs, seed + 1), check_first_proof(n_pairs, seed + 2),
            check_nonnegativity(n_points, seed + 3), check_both_proofs(seed=seed + 4)]


def suite_passed(results: list[CheckResult]) -> bool:
    return all(r.passed for r in results)


__all__ = ["CheckResult", "algebra_suite", "radial_suite", "suite_passed", "random_poly", "random_rational",
           "random_radial_poly"]
