"""Kernel scans and their CSV form."""
from __future__ import annotations

import csv
from typing import Iterable, Sequence

import numpy as np

from .heat import grad_p_t_batch, heat_residual_batch
from .quadrature import QuadratureSpec

SCAN_FIELDS = (["t"] + [f"g{k}" for k in range(1, 7)] + ["p"]
               + [f"d_x{k}" for k in (1, 2, 3)] + [f"d_y{k}" for k in (1, 2, 3)] + ["residual"])


def scan(t_list: Sequence[float], grid, spec: QuadratureSpec | None = None,
         residuals: bool = True) -> list[dict]:
    """One row per ``(t, g)``: value, Euclidean gradient and heat residual."""
    grid = np.atleast_2d(np.asarray(grid, dtype=float))
    rows = []
    for t in t_list:
        v, gr = grad_p_t_batch(t, grid, spec)
        res = heat_residual_batch(t, grid, spec) if residuals else np.full(len(grid), np.nan)
        for k, g in enumerate(grid):
            vals = [t, *g, v[k], *gr[k], res[k]]
            rows.append(dict(zip(SCAN_FIELDS, (float(a) for a in vals))))
    return rows


def write_csv(rows: Iterable[dict], path, fields: Sequence[str] = SCAN_FIELDS) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(fields))
        w.writeheader()
        for r in rows:
            w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in r.items()})


def read_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        return [{k: float(v) for k, v in r.items()} for r in csv.DictReader(fh)]
