"""Exact polynomial calculus on the step-two group ``N_{3,2}``."""
from .carre import gamma, gamma2, gamma2_at, gamma2_display, gamma2_lower_bound_gap, gamma2_split_display
from .commutant import commutant_basis, same_span, stock_commutant
from .fields import (DiffOp, VectorField, X, Xhat, Y, commutator, dilation_field, is_radial, lie_bracket,
                     sublaplacian, sublaplacian_op, theta)
from .group import IDENTITY, Point6, dilate, dilate_array, inverse, multiply, multiply_array
from .polynomial import COORDS, MultiPoly, monomials

__all__ = [
    "gamma", "gamma2", "gamma2_at", "gamma2_display", "gamma2_lower_bound_gap", "gamma2_split_display",
    "commutant_basis", "same_span", "stock_commutant",
    "DiffOp", "VectorField", "X", "Xhat", "Y", "commutator", "dilation_field", "is_radial", "lie_bracket",
    "sublaplacian", "sublaplacian_op", "theta",
    "IDENTITY", "Point6", "dilate", "dilate_array", "inverse", "multiply", "multiply_array",
    "COORDS", "MultiPoly", "monomials",
]
