"""Sparse multivariate polynomials with exact rational coefficients.

A :class:`MultiPoly` stores a mapping ``exponent tuple -> Fraction`` with no
zero coefficients. Instances are immutable; every operation returns a new
polynomial. Terms are reported in graded lexicographic order (total degree
first, then lexicographic on the exponent tuple in variable order), which
fixes the canonical form used for equality, hashing and serialization.

The default variable set is the six coordinates ``x1, x2, x3, y1, y2, y3``
of the group; other variable sets (for instance the radial jet ring) are
supported through ``names``.
"""
from __future__ import annotations

import json
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping, Sequence

import numpy as np

COORDS = ("x1", "x2", "x3", "y1", "y2", "y3")

Exponent = tuple[int, ...]


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, Rational)):
        return Fraction(c)
    if isinstance(c, str):
        return Fraction(c)
    raise TypeError(f"exact coefficient required, got {type(c).__name__}")


def grlex_key(exp: Exponent):
    return (sum(exp), exp)


class MultiPoly:
    """Exact sparse polynomial in a fixed, named set of variables."""

    __slots__ = ("_terms", "names", "_hash")

    def __init__(self, terms: Mapping[Exponent, object] | None = None,
                 names: Sequence[str] = COORDS):
        self.names = tuple(names)
        n = len(self.names)
        clean: dict[Exponent, Fraction] = {}
        if terms:
            for exp, c in terms.items():
                exp = tuple(int(e) for e in exp)
                if len(exp) != n or min(exp, default=0) < 0:
                    raise ValueError(f"bad exponent {exp} for {n} variables")
                c = _as_fraction(c)
                if c:
                    c = clean.get(exp, 0) + c
                    if c:
                        clean[exp] = c
                    else:
                        clean.pop(exp, None)
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict, names: tuple) -> "MultiPoly":
        # trusted constructor: terms already canonical (no zeros, Fraction values)
        obj = cls.__new__(cls)
        obj._terms = terms
        obj.names = names
        obj._hash = None
        return obj

    # construction helpers -------------------------------------------------
    @classmethod
    def constant(cls, c, names: Sequence[str] = COORDS) -> "MultiPoly":
        return cls({(0,) * len(names): c}, names)

    @classmethod
    def var(cls, name_or_index, names: Sequence[str] = COORDS) -> "MultiPoly":
        names = tuple(names)
        i = names.index(name_or_index) if isinstance(name_or_index, str) else int(name_or_index)
        exp = [0] * len(names)
        exp[i] = 1
        return cls({tuple(exp): 1}, names)

    @classmethod
    def gens(cls, names: Sequence[str] = COORDS) -> tuple["MultiPoly", ...]:
        return tuple(cls.var(i, names) for i in range(len(names)))

    def zero_like(self) -> "MultiPoly":
        return MultiPoly._raw({}, self.names)

    # basic protocol -------------------------------------------------------
    @property
    def nvars(self) -> int:
        return len(self.names)

    def terms(self) -> list[tuple[Exponent, Fraction]]:
        """Terms in descending graded lexicographic order."""
        return sorted(self._terms.items(), key=lambda kv: grlex_key(kv[0]), reverse=True)

    def coefficient(self, exp: Exponent) -> Fraction:
        return self._terms.get(tuple(exp), Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def degree(self) -> int:
        return max((sum(e) for e in self._terms), default=-1)

    def is_constant(self) -> bool:
        return all(not any(e) for e in self._terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, MultiPoly):
            try:
                other = self._coerce(other)
            except TypeError:
                return NotImplemented
        return self.names == other.names and self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.names, frozenset(self._terms.items())))
        return self._hash

    def _coerce(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            if other.names != self.names:
                raise ValueError("polynomials live in different variable sets")
            return other
        return MultiPoly.constant(_as_fraction(other), self.names)

    # arithmetic -----------------------------------------------------------
    def __add__(self, other) -> "MultiPoly":
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        if len(other._terms) > len(self._terms):
            a, b = other._terms, self._terms
        else:
            a, b = self._terms, other._terms
        out = dict(a)
        for exp, c in b.items():
            s = out.get(exp)
            if s is None:
                out[exp] = c
            else:
                s += c
                if s:
                    out[exp] = s
                else:
                    del out[exp]
        return MultiPoly._raw(out, self.names)

    __radd__ = __add__

    def __neg__(self) -> "MultiPoly":
        return MultiPoly._raw({e: -c for e, c in self._terms.items()}, self.names)

    def __sub__(self, other) -> "MultiPoly":
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "MultiPoly":
        return (-self) + other

    def scale(self, c) -> "MultiPoly":
        c = _as_fraction(c)
        if not c:
            return self.zero_like()
        return MultiPoly._raw({e: c * v for e, v in self._terms.items()}, self.names)

    def __mul__(self, other) -> "MultiPoly":
        if not isinstance(other, MultiPoly):
            try:
                return self.scale(other)
            except TypeError:
                return NotImplemented
        other = self._coerce(other)
        out: dict[Exponent, Fraction] = {}
        get = out.get
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = get(e, 0) + c1 * c2
        return MultiPoly._raw({e: c for e, c in out.items() if c}, self.names)

    def __rmul__(self, other) -> "MultiPoly":
        return self.__mul__(other)

    def __truediv__(self, other) -> "MultiPoly":
        return self.scale(1 / _as_fraction(other))

    def __pow__(self, k: int) -> "MultiPoly":
        if k < 0:
            raise ValueError("negative power")
        result = MultiPoly.constant(1, self.names)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # calculus -------------------------------------------------------------
    def diff(self, var) -> "MultiPoly":
        i = self.names.index(var) if isinstance(var, str) else int(var)
        out = {}
        for e, c in self._terms.items():
            k = e[i]
            if k:
                ne = e[:i] + (k - 1,) + e[i + 1:]
                out[ne] = c * k
        return MultiPoly._raw(out, self.names)

    # evaluation -----------------------------------------------------------
    def __call__(self, point: Sequence) -> object:
        return self.evaluate(point)

    def evaluate(self, point: Sequence):
        """Evaluate at a point; exact when the point holds ints/Fractions."""
        if len(point) != self.nvars:
            raise ValueError(f"expected {self.nvars} coordinates, got {len(point)}")
        powers: list[dict[int, object]] = [{0: 1} for _ in point]
        total = 0
        for e, c in self._terms.items():
            term = c
            for i, k in enumerate(e):
                if k:
                    cache = powers[i]
                    pk = cache.get(k)
                    if pk is None:
                        pk = point[i] ** k
                        cache[k] = pk
                    term = term * pk
            total = total + term
        if isinstance(total, int):
            return Fraction(total)
        return total

    def evaluate_float(self, point: Sequence[float]) -> float:
        return float(self.evaluate([float(v) for v in point]))

    def evaluate_array(self, points: np.ndarray) -> np.ndarray:
        """Vectorized floating evaluation; ``points`` has shape (..., nvars)."""
        pts = np.asarray(points, dtype=float)
        out = np.zeros(pts.shape[:-1])
        for e, c in self._terms.items():
            term = np.full(pts.shape[:-1], float(c))
            for i, k in enumerate(e):
                if k:
                    term = term * pts[..., i] ** k
            out = out + term
        return out

    def substitute(self, images: Sequence["MultiPoly"]) -> "MultiPoly":
        """Compose: replace variable ``i`` by ``images[i]`` (all in one target ring)."""
        if len(images) != self.nvars:
            raise ValueError("one image per variable required")
        target = images[0].names
        cache: list[dict[int, MultiPoly]] = [{} for _ in images]
        out = MultiPoly._raw({}, target)
        for e, c in self._terms.items():
            term = MultiPoly.constant(c, target)
            for i, k in enumerate(e):
                if k:
                    pk = cache[i].get(k)
                    if pk is None:
                        pk = images[i] ** k
                        cache[i][k] = pk
                    term = term * pk
            out = out + term
        return out

    # presentation ---------------------------------------------------------
    def __repr__(self) -> str:
        return f"MultiPoly({self})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for e, c in self.terms():
            mono = "*".join(n if k == 1 else f"{n}^{k}" for n, k in zip(self.names, e) if k)
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def to_json(self) -> dict:
        return {
            "variables": list(self.names),
            "terms": [[list(e), f"{c.numerator}/{c.denominator}"] for e, c in self.terms()],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "MultiPoly":
        names = tuple(data["variables"])
        return cls({tuple(e): Fraction(c) for e, c in data["terms"]}, names)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def poly_from_terms(pairs: Iterable[tuple[Exponent, object]],
                    names: Sequence[str] = COORDS) -> MultiPoly:
    out: dict = {}
    for e, c in pairs:
        out[tuple(e)] = out.get(tuple(e), 0) + _as_fraction(c)
    return MultiPoly(out, names)


def monomials(nvars: int, max_degree: int) -> list[Exponent]:
    """All exponent tuples of total degree <= max_degree, grlex ascending."""
    out: list[Exponent] = []

    def rec(prefix: list[int], remaining: int, slots: int):
        if slots == 1:
            for k in range(remaining + 1):
                out.append(tuple(prefix + [k]))
            return
        for k in range(remaining + 1):
            rec(prefix + [k], remaining - k, slots - 1)

    rec([], max_degree, nvars)
    out.sort(key=grlex_key)
    return out
