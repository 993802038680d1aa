"""Reduction of rotation-invariant functions to ``(r1, r2, z)``."""
from .coords import (RADIAL_NAMES, RadialPoint, canonical_point, canonical_point_array, lift_radial,
                     radial_coords, radial_coords_array, radial_gens, radial_poly)
from .jets import (JetRing, RadialJet, gammahat, gammahat2_expanded, gammahat2_formal_residual,
                   gammahat2_r1_only, gammahat2_sos, jet_of, lhat, sos_minus_expanded_cleared)
from .proofs import Certificate, consistency_check, first_proof_certificate, nine_equations_residual

__all__ = [
    "RADIAL_NAMES", "RadialPoint", "canonical_point", "canonical_point_array", "lift_radial",
    "radial_coords", "radial_coords_array", "radial_gens", "radial_poly",
    "JetRing", "RadialJet", "gammahat", "gammahat2_expanded", "gammahat2_formal_residual",
    "gammahat2_r1_only", "gammahat2_sos", "jet_of", "lhat", "sos_minus_expanded_cleared",
    "Certificate", "consistency_check", "first_proof_certificate", "nine_equations_residual",
]
