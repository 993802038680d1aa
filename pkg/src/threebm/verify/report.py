"""Report container shared by the inequality audits."""
from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

SATISFIED = "satisfied"
VIOLATED = "violated"
INDETERMINATE = "indeterminate"


def classify(margin: float, tol: float) -> str:
    """``margin >= 0`` is the inequality. Within ``tol`` of zero on the wrong
    side the point is indeterminate, beyond it a violation."""
    if not math.isfinite(margin):
        return INDETERMINATE
    if margin >= 0:
        return SATISFIED
    return INDETERMINATE if margin >= -tol else VIOLATED


def _plain(v):
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, np.bool_):
        return bool(v)
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    return v


@dataclass
class VerifyReport:
    """Per-point rows, fitted constants and the tolerances in force.

    Each row carries ``margin`` (nonnegative when the inequality holds),
    ``tol`` and ``status``.
    """

    inequality: str
    grid: dict
    rows: list = field(default_factory=list)
    constants: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)
    excluded: list = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)

    @property
    def worst_margin(self) -> float:
        m = [r["margin"] for r in self.rows if math.isfinite(r.get("margin", math.nan))]
        return min(m) if m else math.nan

    @property
    def violations(self) -> list:
        return [r for r in self.rows if r.get("status") == VIOLATED]

    @property
    def passed(self) -> bool:
        return not self.violations and self.diagnostics.get("pass", True)

    def counts(self) -> dict:
        out = {SATISFIED: 0, INDETERMINATE: 0, VIOLATED: 0}
        for r in self.rows:
            out[r.get("status", INDETERMINATE)] += 1
        return out

    def to_json(self) -> dict:
        d = _plain(asdict(self))
        d["worst_margin"] = self.worst_margin
        d["counts"] = self.counts()
        d["pass"] = self.passed
        return d

    def dump(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=2, allow_nan=True))

    def write_csv(self, path) -> None:
        if not self.rows:
            Path(path).write_text("")
            return
        keys = list(dict.fromkeys(k for r in self.rows for k in r))
        with open(path, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=keys)
            w.writeheader()
            for r in self.rows:
                w.writerow({k: repr(v) if isinstance(v, float) else _plain(v) for k, v in r.items()})
