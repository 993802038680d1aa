from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from threebm.algebra import gamma, gamma2_at, is_radial, sublaplacian
from threebm.checks import random_radial_poly
from threebm.radial import (RADIAL_NAMES, canonical_point, canonical_point_array, consistency_check,
                            first_proof_certificate, gammahat, gammahat2_expanded, gammahat2_formal_residual,
                            gammahat2_r1_only, gammahat2_sos, jet_of, lhat, lift_radial, radial_coords,
                            radial_coords_array, sos_minus_expanded_cleared)
from threebm.radial.coords import exact_radial_point, random_rotation, rotate

from conftest import floats6, points6

radial_polys = st.integers(0, 10_000).map(lambda s: random_radial_poly(np.random.default_rng(s)))


def _nondegenerate(g):
    p = exact_radial_point(g)
    return p.r1 > 0 and p.gram_gap > 0


@given(floats6, st.integers(0, 10_000))
def test_radial_coords_rotation_invariant(g, seed):
    U = random_rotation(np.random.default_rng(seed))
    assert np.allclose(radial_coords_array(rotate(U, g)), radial_coords_array(g), atol=1e-12)


@given(floats6)
def test_canonical_point_has_same_coordinates(g):
    r = radial_coords_array(g)
    c = np.asarray(canonical_point(r))
    assert np.allclose(radial_coords_array(c), r, atol=1e-9)
    assert np.allclose(canonical_point_array(r[None])[0], c)


def test_canonical_point_rejects_invalid():
    with pytest.raises(ValueError):
        canonical_point((1.0, 1.0, 2.0))


@given(radial_polys)
def test_lift_is_radial(f):
    assert is_radial(lift_radial(f))


@given(radial_polys, radial_polys, points6)
def test_reduced_operators_match_full_space(f, h, g):
    p = exact_radial_point(g)
    F, G = lift_radial(f), lift_radial(h)
    jf, jh = jet_of(f, p), jet_of(h, p)
    assert sublaplacian(F)(g) == lhat(jf, p)
    assert gamma(F, G)(g) == gammahat(jf, jh, p)


@given(radial_polys, points6)
def test_consistency_residuals_vanish(f, g):
    assert all(r == 0 for r in consistency_check(f, g))


@given(radial_polys, points6.filter(_nondegenerate))
def test_sos_value_matches_expanded_and_full_space(f, g):
    p = exact_radial_point(g)
    j = jet_of(f, p)
    sos, terms = gammahat2_sos(j, p)
    assert all(t >= 0 for t in terms)
    assert sos == gammahat2_expanded(j, p) == gamma2_at(lift_radial(f), g)


@given(radial_polys, points6.filter(_nondegenerate))
def test_first_proof_certificate(f, g):
    cert = first_proof_certificate(f, g)
    assert cert.residual == 0
    assert all(r == 0 for r in cert.closed_form_residuals)


def test_formal_identities():
    assert gammahat2_formal_residual().is_zero()
    assert sos_minus_expanded_cleared().is_zero()
    g, expected = gammahat2_r1_only()
    assert g == expected


def test_radial_point_validity():
    assert radial_coords([1, 2, 2, 0, 0, 0]) == (9, 0, 0)
    assert exact_radial_point([1, 0, 0, Fraction(1, 2), 1, 0]).gram_gap == 1
    assert RADIAL_NAMES == ("r1", "r2", "z")
