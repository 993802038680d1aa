"""Reduced operators on functions of ``(r1, r2, z)``.

Numerically these act on a :class:`RadialJet` (derivative values at a
point). Symbolically, :class:`JetRing` treats ``f`` as a formal function:
its partial derivatives up to order three are independent ring variables
and ``D_k`` is the total derivative along ``r1``, ``r2`` or ``z``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement
from typing import Sequence

from ..algebra.polynomial import MultiPoly
from ..errors import DegenerateError
from .coords import RADIAL_NAMES, RadialPoint

_LETTERS = ("1", "2", "z")


@dataclass(frozen=True)
class RadialJet:
    """Derivatives of ``f(r1, r2, z)`` at one point (single slot per mixed partial)."""

    f1: object = 0
    f2: object = 0
    fz: object = 0
    f11: object = 0
    f12: object = 0
    f1z: object = 0
    f22: object = 0
    f2z: object = 0
    fzz: object = 0
    third: dict = field(default_factory=dict)


def jet_of(f: MultiPoly, p: Sequence) -> RadialJet:
    """Exact jet of a polynomial in ``(r1, r2, z)`` at ``p``."""
    if f.names != RADIAL_NAMES:
        raise ValueError("expected a polynomial in (r1, r2, z)")
    d = [f.diff(k) for k in range(3)]
    dd = {(a, b): d[a].diff(b) for a in range(3) for b in range(a, 3)}
    third = {}
    for a, b, c in combinations_with_replacement(range(3), 3):
        key = "f" + _LETTERS[a] + _LETTERS[b] + _LETTERS[c]
        third[key] = dd[(a, b)].diff(c).evaluate(p)
    ev = lambda q: q.evaluate(p)  # noqa: E731
    return RadialJet(ev(d[0]), ev(d[1]), ev(d[2]), ev(dd[(0, 0)]), ev(dd[(0, 1)]), ev(dd[(0, 2)]),
                     ev(dd[(1, 1)]), ev(dd[(1, 2)]), ev(dd[(2, 2)]), third)


def lhat(j: RadialJet, p: Sequence):
    r1, r2, z = p
    X = r1 * r2 - z * z
    return 4 * r1 * j.f11 + X * j.f22 + r2 * j.fzz + 4 * z * j.f1z + 6 * j.f1 + r1 * j.f2


def gammahat(ja: RadialJet, jb: RadialJet, p: Sequence):
    r1, r2, z = p
    X = r1 * r2 - z * z
    return (4 * r1 * ja.f1 * jb.f1 + X * ja.f2 * jb.f2 + r2 * ja.fz * jb.fz
            + 2 * z * ja.f1 * jb.fz + 2 * z * ja.fz * jb.f1)


def gammahat2_expanded(j: RadialJet, p: Sequence):
    """Fully expanded reduced ``Gamma_2``."""
    r1, r2, z = p
    X = r1 * r2 - z * z
    half = 0.5 if isinstance(r1, float) else Fraction(1, 2)
    f1, f2, fz = j.f1, j.f2, j.fz
    f11, f12, f1z, f22, f2z, fzz = j.f11, j.f12, j.f1z, j.f22, j.f2z, j.fzz
    return (16 * r1 ** 2 * f11 ** 2 + 16 * r1 * f1 * f11 + 8 * r1 * X * f12 ** 2 + 8 * X * f2 * f12
            + 8 * (r1 * r2 + z ** 2) * f1z ** 2 + 32 * r1 * z * f11 * f1z + r1 * X * f2 * f22
            + X ** 2 * f22 ** 2 + 2 * X * fz * f2z + 8 * z * X * f12 * f2z
            + (2 * r2 + half * r1 ** 2) * f2 ** 2 + 2 * r2 * X * f2z ** 2 + r2 ** 2 * fzz ** 2
            + 4 * r2 * f1 * fzz + 8 * r2 * z * f1z * fzz + 16 * z * f1 * f1z + 8 * z ** 2 * f11 * fzz
            + 12 * f1 ** 2 + half * r1 * fz ** 2 - 4 * X * f1 * f22 - 4 * r1 * f1 * f2
            - X * f2 * fzz - 2 * z * f2 * fz)


def gammahat2_sos(j: RadialJet, p: Sequence):
    """Weighted sum of squares for the reduced ``Gamma_2`` (needs ``r1 > 0``).

    Returns ``(value, terms)`` where ``terms`` are the six nonnegative
    contributions whose sum is ``value``.
    """
    r1, r2, z = p
    if r1 == 0:
        raise DegenerateError("sum-of-squares form is undefined at r1 = 0; use gammahat2_expanded")
    exact = isinstance(r1, (int, Fraction))
    if exact:
        r1 = Fraction(r1)
    half = Fraction(1, 2) if exact else 0.5
    X = r1 * r2 - z * z
    f1, f2, fz = j.f1, j.f2, j.fz
    f11, f12, f1z, f22, f2z, fzz = j.f11, j.f12, j.f1z, j.f22, j.f2z, j.fzz
    terms = (
        (X * f22 + half * r1 * f2 - 2 * f1) ** 2,
        8 * r1 * X * (f12 + f2 / (2 * r1) + z * f2z / (2 * r1)) ** 2,
        (2 / r1) * (X * f2z + half * r1 * fz - z * f2) ** 2,
        (half * r1 * f2 - 2 * f1 - X / r1 * fzz) ** 2,
        4 * (f1 + z ** 2 / (2 * r1) * fzz + 2 * r1 * f11 + 2 * z * f1z) ** 2,
        2 * X * (z / r1 * fzz + 2 * f1z) ** 2,
    )
    return sum(terms), terms


# formal jet calculus -----------------------------------------------------

def _symbol(multi: Sequence[int]) -> str:
    return "f" + "".join(_LETTERS[k] for k in sorted(multi))


@lru_cache(maxsize=None)
def _jet_symbols(order: int) -> tuple[tuple[str, tuple[int, ...]], ...]:
    out = [("f", ())]
    for n in range(1, order + 1):
        for multi in combinations_with_replacement(range(3), n):
            out.append((_symbol(multi), multi))
    return tuple(out)


class JetRing:
    """Polynomials in ``(r1, r2, z)`` and the formal derivatives of ``f``."""

    def __init__(self, order: int = 3):
        self.order = order
        syms = _jet_symbols(order)
        self.names = RADIAL_NAMES + tuple(s for s, _ in syms)
        self._multi = {s: m for s, m in syms}
        self.gens = {n: MultiPoly.var(n, self.names) for n in self.names}

    def __getitem__(self, name: str) -> MultiPoly:
        return self.gens[name]

    def const(self, c) -> MultiPoly:
        return MultiPoly.constant(c, self.names)

    def D(self, F: MultiPoly, k: int) -> MultiPoly:
        """Total derivative along coordinate ``k`` (0: r1, 1: r2, 2: z)."""
        out = F.diff(k)
        for s, multi in self._multi.items():
            dF = F.diff(s)
            if dF.is_zero():
                continue
            if len(multi) >= self.order:
                raise ValueError(f"jet order {self.order} exceeded differentiating {s}")
            out = out + dF * self.gens[_symbol(multi + (k,))]
        return out

    def lhat(self, F: MultiPoly) -> MultiPoly:
        r1, r2, z = self["r1"], self["r2"], self["z"]
        D = self.D
        d1, d2, dz = D(F, 0), D(F, 1), D(F, 2)
        return (r1 * D(d1, 0) * 4 + (r1 * r2 - z * z) * D(d2, 1) + r2 * D(dz, 2)
                + z * D(d1, 2) * 4 + d1 * 6 + r1 * d2)

    def gammahat(self, F: MultiPoly, G: MultiPoly) -> MultiPoly:
        r1, r2, z = self["r1"], self["r2"], self["z"]
        D = self.D
        F1, F2, Fz = D(F, 0), D(F, 1), D(F, 2)
        G1, G2, Gz = D(G, 0), D(G, 1), D(G, 2)
        return (r1 * F1 * G1 * 4 + (r1 * r2 - z * z) * F2 * G2 + r2 * Fz * Gz
                + z * (F1 * Gz + Fz * G1) * 2)

    def gammahat2(self, F: MultiPoly) -> MultiPoly:
        """``(Lhat Gammahat(F, F) - 2 Gammahat(F, Lhat F)) / 2``."""
        return (self.lhat(self.gammahat(F, F)) - self.gammahat(F, self.lhat(F)) * 2) * Fraction(1, 2)

    def jet_of_f(self) -> RadialJet:
        g = self.gens
        return RadialJet(g["f1"], g["f2"], g["fz"], g["f11"], g["f12"], g["f1z"], g["f22"], g["f2z"], g["fzz"])

    def point(self) -> RadialPoint:
        return RadialPoint(self["r1"], self["r2"], self["z"])

    def restrict(self, F: MultiPoly, keep: Sequence[str]) -> MultiPoly:
        """Set every jet symbol not in ``keep`` to zero."""
        images = [self.gens[n] if (n in RADIAL_NAMES or n in keep) else self.const(0) for n in self.names]
        return F.substitute(images)


def _ring_expanded(R: JetRing) -> MultiPoly:
    # the numeric formula is generic over the coefficient type
    return gammahat2_expanded(R.jet_of_f(), R.point())


def sos_cleared(R: JetRing) -> MultiPoly:
    """``r1^2`` times the sum-of-squares form, as a polynomial."""
    g = R.gens
    r1, r2, z = g["r1"], g["r2"], g["z"]
    f1, f2, fz = g["f1"], g["f2"], g["fz"]
    f11, f12, f1z, f22, f2z, fzz = g["f11"], g["f12"], g["f1z"], g["f22"], g["f2z"], g["fzz"]
    X = r1 * r2 - z * z
    h = Fraction(1, 2)
    s1 = X * f22 + r1 * f2 * h - f1 * 2
    s2 = r1 * f12 * 2 + f2 + z * f2z
    s3 = X * f2z + r1 * fz * h - z * f2
    s4 = r1 * r1 * f2 * h - r1 * f1 * 2 - X * fzz
    s5 = r1 * f1 * 2 + z * z * fzz + r1 * r1 * f11 * 4 + r1 * z * f1z * 4
    s6 = z * fzz + r1 * f1z * 2
    return (r1 * r1 * s1 * s1 + r1 * X * s2 * s2 * 2 + r1 * s3 * s3 * 2 + s4 * s4 + s5 * s5
            + X * s6 * s6 * 2)


def gammahat2_formal_residual(order: int = 3) -> MultiPoly:
    """Definitional reduced ``Gamma_2`` minus the expanded display; zero."""
    R = JetRing(order)
    return R.gammahat2(R["f"]) - _ring_expanded(R)


def sos_minus_expanded_cleared() -> MultiPoly:
    """``r1^2 (SOS - expanded)`` as an exact polynomial; zero."""
    R = JetRing(2)
    return sos_cleared(R) - R["r1"] * R["r1"] * _ring_expanded(R)


def gammahat2_r1_only() -> tuple[MultiPoly, MultiPoly]:
    """Definitional reduced ``Gamma_2`` for ``f = f(r1)`` and the expected
    ``16 r1^2 f11^2 + 16 r1 f1 f11 + 12 f1^2``."""
    R = JetRing(3)
    g = R.restrict(R.gammahat2(R["f"]), ("f", "f1", "f11", "f111"))
    r1, f1, f11 = R["r1"], R["f1"], R["f11"]
    return g, r1 * r1 * f11 * f11 * 16 + r1 * f1 * f11 * 16 + f1 * f1 * 12
