from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from threebm.algebra import (COORDS, IDENTITY, MultiPoly, X, Xhat, Y, commutator, dilate, dilate_array,
                             dilation_field, gamma, gamma2, gamma2_display, gamma2_split_display, inverse,
                             is_radial, lie_bracket, multiply, multiply_array, sublaplacian, sublaplacian_op, theta)
from threebm.algebra.carre import gamma2_lower_bound_gap, gamma2_lower_bound_gap_poly
from threebm.algebra.fields import VectorField
from threebm.checks import check_brackets, check_L_commutators, check_radial_tables, random_poly

from conftest import positive_rationals, points6

small_polys = st.integers(0, 10_000).map(lambda s: random_poly(np.random.default_rng(s), 3, 5))


# group law -----------------------------------------------------------------

@given(points6, points6, points6)
def test_group_associative(a, b, c):
    assert multiply(multiply(a, b), c) == multiply(a, multiply(b, c))


@given(points6)
def test_inverse_and_identity(g):
    assert multiply(g, inverse(g)) == IDENTITY
    assert multiply(IDENTITY, g) == tuple(g)


@given(positive_rationals, points6, points6)
def test_dilation_is_automorphism(lam, a, b):
    assert dilate(lam, multiply(a, b)) == multiply(dilate(lam, a), dilate(lam, b))


def test_area_coordinate_orientation():
    # moving along x1 then x2 adds +1/2 to y3
    assert multiply([1, 0, 0, 0, 0, 0], [0, 1, 0, 0, 0, 0])[5] == Fraction(1, 2)


@given(st.integers(0, 1000))
def test_array_law_matches_exact(seed):
    rng = np.random.default_rng(seed)
    a, b = rng.normal(size=(2, 6))
    assert np.allclose(multiply_array(a[None], b[None])[0], np.array(multiply(a, b), dtype=float), atol=1e-14)
    assert np.allclose(dilate_array(1.7, a[None])[0], np.array(dilate(1.7, a), dtype=float))


# polynomials ---------------------------------------------------------------

@given(small_polys, small_polys, points6)
def test_polynomial_ring_homomorphism(f, g, p):
    assert (f * g)(p) == f(p) * g(p)
    assert (f + g)(p) == f(p) + g(p)


@given(small_polys, small_polys)
def test_product_rule(f, g):
    for k in range(6):
        assert (f * g).diff(k) == f.diff(k) * g + f * g.diff(k)


@given(small_polys)
def test_json_round_trip(f):
    assert MultiPoly.from_json(f.to_json()) == f


def test_evaluate_array_matches_exact():
    rng = np.random.default_rng(0)
    f = random_poly(rng, 3, 6)
    pts = rng.normal(size=(5, 6))
    exact = [float(f.evaluate([Fraction(v) for v in p])) for p in pts]
    assert np.allclose(f.evaluate_array(pts), exact, rtol=1e-12)


# fields and operators ------------------------------------------------------

@given(small_polys, small_polys)
def test_bracket_is_commutator_of_actions(f, g):
    V, W = X(1) * 1, theta(2)
    B = lie_bracket(V, W)
    assert B(f) == V(W(f)) - W(V(f))


def test_jacobi_identity():
    fields = [X(1), X(2), Xhat(3), theta(1), Y(2)]
    for A in fields:
        for B in fields:
            for C in fields:
                s = lie_bracket(A, lie_bracket(B, C)) + lie_bracket(B, lie_bracket(C, A)) + \
                    lie_bracket(C, lie_bracket(A, B))
                assert s.is_zero()


def test_printed_theta_orientation_gives_minus_sign():
    # the opposite rotation orientation turns the cyclic bracket into -theta
    flipped = [VectorField([-c for c in theta(i).a + theta(i).c]) for i in (1, 2, 3)]
    assert lie_bracket(flipped[0], flipped[1]) == -flipped[2]


@given(small_polys)
def test_sublaplacian_is_sum_of_squares(f):
    assert sublaplacian(f) == sum((X(i)(X(i)(f)) for i in (1, 2, 3)), MultiPoly(names=COORDS))


@given(small_polys, small_polys)
def test_gamma_symmetric_and_matches_definition(f, g):
    assert gamma(f, g) == gamma(g, f)
    lhs = (sublaplacian(f * g) - f * sublaplacian(g) - g * sublaplacian(f)).scale(Fraction(1, 2))
    assert gamma(f, g) == lhs


@given(small_polys)
def test_gamma2_displays_agree(f):
    g2 = gamma2(f)
    assert g2 == gamma2_display(f) == gamma2_split_display(f)


@given(small_polys)
def test_rotations_commute_with_L(f):
    for i in (1, 2, 3):
        assert sublaplacian(theta(i)(f)) == theta(i)(sublaplacian(f))


def test_structural_checks_pass():
    for r in (check_brackets(), check_L_commutators(), check_radial_tables()):
        assert r.passed, r.detail


def test_dilation_commutator():
    assert commutator(sublaplacian_op(), dilation_field().as_diffop()) == sublaplacian_op()


def test_radial_detection():
    x1, x2, x3, y1, y2, y3 = MultiPoly.gens()
    assert is_radial(x1 * x1 + x2 * x2 + x3 * x3 + x1 * y1 + x2 * y2 + x3 * y3)
    assert not is_radial(x1)


@given(small_polys, st.sampled_from([Fraction(1, 4), Fraction(1), Fraction(4)]), points6)
def test_curvature_gap_nonnegative_and_two_routes_agree(f, lam, p):
    gap = gamma2_lower_bound_gap(f, lam, p)
    assert gap >= 0
    assert gap == gamma2_lower_bound_gap_poly(f, lam, p)


def test_gap_can_fail_for_wrong_sign():
    # a negative lambda is not a valid parameter
    with pytest.raises(ValueError):
        gamma2_lower_bound_gap(MultiPoly.gens()[0], Fraction(-1), [0] * 6)
