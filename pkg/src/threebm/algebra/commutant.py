"""Polynomial vector fields commuting with the sub-Laplacian.

The unknown field ``V = sum_k u_k d_k`` has generic polynomial coefficients
of bounded degree. ``[L, V]`` is linear in the unknowns, so the commutant is
the nullspace of an exact integer matrix. Dilation weight (x has weight 1,
y weight 2) is preserved by ``V -> [L, V]`` up to a shift, which splits the
system into independent blocks.
"""
from __future__ import annotations

from collections import defaultdict
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Sequence

from .fields import DiffOp, VectorField, Xhat, Y, commutator, sublaplacian_op, theta
from .polynomial import COORDS, MultiPoly, monomials

_WEIGHTS = (1, 1, 1, 2, 2, 2)


def commutator_with_L(V: VectorField) -> DiffOp:
    return commutator(sublaplacian_op(), V.as_diffop())


def _basis_field(slot: int, exp: tuple[int, ...]) -> VectorField:
    co = [MultiPoly(names=COORDS)] * 6
    co[slot] = MultiPoly({exp: 1})
    return VectorField(co)


def _flatten(op: DiffOp) -> dict:
    out = {}
    for beta, p in op.terms.items():
        for e, c in p.terms():
            out[(beta, e)] = c
    return out


def _to_integer_rows(columns: Sequence[dict]) -> tuple[list[dict], list]:
    """Transpose sparse columns into integer rows (scaled by the common denominator)."""
    den = 1
    for col in columns:
        for c in col.values():
            den = lcm(den, c.denominator)
    rows: dict = defaultdict(dict)
    for j, col in enumerate(columns):
        for key, c in col.items():
            rows[key][j] = int(c * den)
    keys = sorted(rows, key=repr)
    return [rows[k] for k in keys], keys


def _normalize(row: dict) -> dict:
    g = 0
    for v in row.values():
        g = gcd(g, v)
    if g > 1:
        row = {k: v // g for k, v in row.items()}
    return row


def echelon(rows: Iterable[dict]) -> list[tuple[int, dict]]:
    """Fraction-free reduced echelon form of sparse integer rows.

    Returns ``(pivot_column, row)`` pairs; every pivot column is zero in all
    other rows. Rows are kept primitive (content divided out) so entries stay
    small without ever leaving the integers.
    """
    pivots: list[tuple[int, dict]] = []
    for row in rows:
        row = {k: v for k, v in row.items() if v}
        for p, prow in pivots:
            v = row.get(p)
            if v:
                pv = prow[p]
                new = {k: pv * val for k, val in row.items()}
                for k, val in prow.items():
                    s = new.get(k, 0) - v * val
                    if s:
                        new[k] = s
                    else:
                        new.pop(k, None)
                row = _normalize(new)
        if row:
            p = min(row)
            row = _normalize(row)
            if row[p] < 0:
                row = {k: -val for k, val in row.items()}
            # back-eliminate p from earlier pivot rows
            reduced = []
            for q, qrow in pivots:
                v = qrow.get(p)
                if v:
                    pv = row[p]
                    new = {k: pv * val for k, val in qrow.items()}
                    for k, val in row.items():
                        s = new.get(k, 0) - v * val
                        if s:
                            new[k] = s
                        else:
                            new.pop(k, None)
                    qrow = _normalize(new)
                    if qrow[q] < 0:
                        qrow = {k: -val for k, val in qrow.items()}
                reduced.append((q, qrow))
            pivots = reduced + [(p, row)]
    return pivots


def nullspace(columns: Sequence[dict]) -> list[list[Fraction]]:
    """Exact basis of ``{u : sum_j u_j columns[j] = 0}``."""
    n = len(columns)
    rows, _ = _to_integer_rows(columns)
    piv = echelon(rows)
    pivot_cols = {p for p, _ in piv}
    basis = []
    for free in range(n):
        if free in pivot_cols:
            continue
        v = [Fraction(0)] * n
        v[free] = Fraction(1)
        for p, row in piv:
            if free in row:
                v[p] = Fraction(-row[free], row[p])
        basis.append(v)
    return basis


def field_vector(V: VectorField) -> dict:
    out = {}
    for slot, p in enumerate(V.coeffs):
        for e, c in p.terms():
            out[(slot, e)] = c
    return out


def rank_of_fields(fields: Sequence[VectorField]) -> int:
    cols = [field_vector(V) for V in fields]
    rows, _ = _to_integer_rows(cols)
    return len(echelon(rows))


def stock_commutant() -> list[VectorField]:
    """Right-invariant fields, rotations and vertical translations."""
    return [Xhat(i) for i in (1, 2, 3)] + [theta(i) for i in (1, 2, 3)] + [Y(i) for i in (1, 2, 3)]


def commutant_basis(max_degree: int) -> list[VectorField]:
    """Basis of polynomial vector fields (coefficient degree <= max_degree)
    commuting with the sub-Laplacian."""
    if max_degree < 1:
        raise ValueError("max_degree must be at least 1")
    blocks: dict[int, list[tuple[int, tuple]]] = defaultdict(list)
    for slot in range(6):
        for e in monomials(6, max_degree):
            w = sum(a * b for a, b in zip(e, _WEIGHTS)) - _WEIGHTS[slot]
            blocks[w].append((slot, e))
    basis: list[VectorField] = []
    for w in sorted(blocks):
        unknowns = blocks[w]
        columns = [_flatten(commutator_with_L(_basis_field(s, e))) for s, e in unknowns]
        for vec in nullspace(columns):
            co = [dict() for _ in range(6)]
            for (s, e), c in zip(unknowns, vec):
                if c:
                    co[s][e] = c
            basis.append(VectorField([MultiPoly(d) for d in co]))
    return basis


def same_span(A: Sequence[VectorField], B: Sequence[VectorField]) -> bool:
    ra, rb = rank_of_fields(A), rank_of_fields(B)
    return ra == rb == rank_of_fields(list(A) + list(B))
