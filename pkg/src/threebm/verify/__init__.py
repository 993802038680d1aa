"""Numerical audits of the functional inequalities, each returning a :class:`VerifyReport`."""
from .kernel_audits import gradient_ratio_scan, harnack_fit, li_yau_scan
from .mc_audits import RadialBump, driver_melcher_ratio, radial_inequality_gaps, reverse_poincare_gap
from .report import INDETERMINATE, SATISFIED, VIOLATED, VerifyReport, classify
from .semigroup import SemigroupValue, semigroup_apply

__all__ = [
    "gradient_ratio_scan", "harnack_fit", "li_yau_scan",
    "RadialBump", "driver_melcher_ratio", "radial_inequality_gaps", "reverse_poincare_gap",
    "INDETERMINATE", "SATISFIED", "VIOLATED", "VerifyReport", "classify",
    "SemigroupValue", "semigroup_apply",
]
