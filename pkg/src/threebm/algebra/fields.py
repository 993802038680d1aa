"""Vector fields and linear differential operators with polynomial coefficients.

A :class:`VectorField` is ``sum_i a_i d/dx_i + c_i d/dy_i``. A
:class:`DiffOp` is a general linear operator ``sum_beta c_beta D^beta``; it
is only needed for operator identities that are not first order, such as
``[L, D] = L``.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Iterable, Sequence

from .group import nxt
from .polynomial import COORDS, MultiPoly

_GENS = MultiPoly.gens(COORDS)
_X = _GENS[0:3]
_Y = _GENS[3:6]
_ZERO = MultiPoly(names=COORDS)
HALF = Fraction(1, 2)


class VectorField:
    """First-order operator with coefficients ``(a1, a2, a3, c1, c2, c3)``."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence[MultiPoly | int | Fraction]):
        if len(coeffs) != 6:
            raise ValueError("a vector field has six coefficients")
        self.coeffs = tuple(c if isinstance(c, MultiPoly) else MultiPoly.constant(c) for c in coeffs)

    @classmethod
    def zero(cls) -> "VectorField":
        return cls([_ZERO] * 6)

    @property
    def a(self) -> tuple[MultiPoly, ...]:
        return self.coeffs[0:3]

    @property
    def c(self) -> tuple[MultiPoly, ...]:
        return self.coeffs[3:6]

    def __call__(self, f: MultiPoly) -> MultiPoly:
        return vf_apply(self, f)

    def __add__(self, other: "VectorField") -> "VectorField":
        return VectorField([p + q for p, q in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other: "VectorField") -> "VectorField":
        return VectorField([p - q for p, q in zip(self.coeffs, other.coeffs)])

    def __neg__(self) -> "VectorField":
        return VectorField([-p for p in self.coeffs])

    def __mul__(self, s) -> "VectorField":
        """Multiply by a scalar or a polynomial function."""
        return VectorField([p * s for p in self.coeffs])

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return isinstance(other, VectorField) and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def is_zero(self) -> bool:
        return all(p.is_zero() for p in self.coeffs)

    def __repr__(self) -> str:
        parts = [f"({p})*d_{n}" for p, n in zip(self.coeffs, COORDS) if p]
        return "VectorField(" + (" + ".join(parts) or "0") + ")"

    def as_diffop(self) -> "DiffOp":
        terms = {}
        for k, p in enumerate(self.coeffs):
            if p:
                terms[_unit(k)] = p
        return DiffOp(terms)

    def to_json(self) -> dict:
        return {name: p.to_json()["terms"] for name, p in zip(COORDS, self.coeffs)}

    @classmethod
    def from_json(cls, data: dict) -> "VectorField":
        return cls([MultiPoly.from_json({"variables": COORDS, "terms": data[n]}) for n in COORDS])


def _unit(k: int) -> tuple[int, ...]:
    e = [0] * 6
    e[k] = 1
    return tuple(e)


def vf_apply(V: VectorField, f: MultiPoly) -> MultiPoly:
    out = _ZERO
    for k, p in enumerate(V.coeffs):
        if p:
            d = f.diff(k)
            if d:
                out = out + p * d
    return out


def lie_bracket(V: VectorField, W: VectorField) -> VectorField:
    """The commutator ``VW - WV`` (first order)."""
    return VectorField([vf_apply(V, w) - vf_apply(W, v) for v, w in zip(V.coeffs, W.coeffs)])


# stock fields ------------------------------------------------------------

@lru_cache(maxsize=None)
def X(i: int) -> VectorField:
    """Left-invariant horizontal field, ``i`` in {1, 2, 3}."""
    j = i - 1
    co = [_ZERO] * 6
    co[j] = MultiPoly.constant(1)
    co[3 + nxt(j, 2)] = _X[nxt(j)] * (-HALF)
    co[3 + nxt(j)] = _X[nxt(j, 2)] * HALF
    return VectorField(co)


@lru_cache(maxsize=None)
def Y(i: int) -> VectorField:
    co = [_ZERO] * 6
    co[3 + i - 1] = MultiPoly.constant(1)
    return VectorField(co)


@lru_cache(maxsize=None)
def Xhat(i: int) -> VectorField:
    """Right-invariant horizontal field."""
    j = i - 1
    co = [_ZERO] * 6
    co[j] = MultiPoly.constant(1)
    co[3 + nxt(j, 2)] = _X[nxt(j)] * HALF
    co[3 + nxt(j)] = _X[nxt(j, 2)] * (-HALF)
    return VectorField(co)


@lru_cache(maxsize=None)
def theta(i: int) -> VectorField:
    """Infinitesimal rotation of the (i+1, i+2) plane acting on x and y together.

    Oriented as ``x_{i+2} d_{i+1} - x_{i+1} d_{i+2}`` (plus the same on y) so
    that ``[theta_i, theta_{i+1}] = theta_{i+2}`` with ``[V, W] = VW - WV``.
    """
    j = i - 1
    a, b = nxt(j), nxt(j, 2)
    co = [_ZERO] * 6
    co[a] = _X[b]
    co[b] = -_X[a]
    co[3 + a] = _Y[b]
    co[3 + b] = -_Y[a]
    return VectorField(co)


@lru_cache(maxsize=None)
def dilation_field() -> VectorField:
    """Generator ``D = 1/2 sum x_i d_i + sum y_i dhat_i`` of the dilations."""
    return VectorField([_X[0] * HALF, _X[1] * HALF, _X[2] * HALF, _Y[0], _Y[1], _Y[2]])


# general operators -------------------------------------------------------

class DiffOp:
    """Linear differential operator ``sum_beta coeff_beta * D^beta``."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict | None = None):
        self.terms = {tuple(b): p for b, p in (terms or {}).items() if p}

    def __call__(self, f: MultiPoly) -> MultiPoly:
        out = _ZERO
        for beta, p in self.terms.items():
            d = f
            for k, m in enumerate(beta):
                for _ in range(m):
                    d = d.diff(k)
                    if not d:
                        break
            if d:
                out = out + p * d
        return out

    def __add__(self, other: "DiffOp") -> "DiffOp":
        out = dict(self.terms)
        for b, p in other.terms.items():
            out[b] = out.get(b, _ZERO) + p
        return DiffOp(out)

    def __neg__(self) -> "DiffOp":
        return DiffOp({b: -p for b, p in self.terms.items()})

    def __sub__(self, other: "DiffOp") -> "DiffOp":
        return self + (-other)

    def __matmul__(self, other: "DiffOp") -> "DiffOp":
        """Composition ``self o other`` via the Leibniz rule."""
        out: dict = {}
        for alpha, a in self.terms.items():
            for beta, b in other.terms.items():
                for gamma in _sub_indices(alpha):
                    db = b
                    weight = 1
                    for k, (g, al) in enumerate(zip(gamma, alpha)):
                        weight *= comb(al, g)
                        for _ in range(g):
                            db = db.diff(k)
                            if not db:
                                break
                        if not db:
                            break
                    if not db:
                        continue
                    order = tuple(al - g + be for al, g, be in zip(alpha, gamma, beta))
                    out[order] = out.get(order, _ZERO) + (a * db) * weight
        return DiffOp(out)

    def __eq__(self, other) -> bool:
        if not isinstance(other, DiffOp):
            return NotImplemented
        return self.terms == other.terms

    def is_zero(self) -> bool:
        return not self.terms

    def order(self) -> int:
        return max((sum(b) for b in self.terms), default=-1)

    def __repr__(self) -> str:
        return f"DiffOp({len(self.terms)} terms, order {self.order()})"


def _sub_indices(alpha: tuple[int, ...]) -> Iterable[tuple[int, ...]]:
    if not alpha:
        yield ()
        return
    for g in range(alpha[0] + 1):
        for rest in _sub_indices(alpha[1:]):
            yield (g,) + rest


def commutator(A: DiffOp, B: DiffOp) -> DiffOp:
    return A @ B - B @ A


@lru_cache(maxsize=None)
def sublaplacian_op() -> DiffOp:
    """``L = X1^2 + X2^2 + X3^2`` as an explicit second-order operator."""
    out = DiffOp()
    for i in (1, 2, 3):
        Xi = X(i).as_diffop()
        out = out + Xi @ Xi
    return out


def sublaplacian(f: MultiPoly) -> MultiPoly:
    out = _ZERO
    for i in (1, 2, 3):
        out = out + X(i)(X(i)(f))
    return out


def is_radial(f: MultiPoly) -> bool:
    """True iff every rotation field annihilates ``f``."""
    return all(theta(i)(f).is_zero() for i in (1, 2, 3))
