from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from berkres.berkovich import (
    SegmentSpec,
    TypeIIPoint,
    crucial_weights,
    endpoint_masses,
    g_hat_eval,
    gamma_for_point,
    log_hsia_gauss,
    min_res_loc_on_segment,
    ord_res_at,
    ord_res_profile,
    restrict_profile,
    segment_weights,
)
from berkres.errors import RefineGridError, UnsupportedError
from berkres.maps import normalized_ord_res
from berkres.valued import LaurentField, PadicField
from conftest import K, PHI1, PHI2, SQUARE, psi

F = Fraction


def pt(rho, a=0, field=K):
    return TypeIIPoint(field.scalar(a), F(rho))


def test_point_equality_is_disc_equality():
    assert pt(1) == TypeIIPoint(K.parse("t^2"), F(1))
    assert pt(1) != TypeIIPoint(K.one, F(1))
    assert pt(1) != pt(2)


def test_gamma_for_point():
    g = gamma_for_point(TypeIIPoint.gauss(K))
    assert (g.a, g.b, g.c, g.d) == (K.one, K.zero, K.zero, K.one)
    g = gamma_for_point(TypeIIPoint(K.scalar(F(1, 12)), F(1, 4)))
    assert g.a == K.uniformizer_power(F(1, 4)) and g.b == K.scalar(F(1, 12))
    with pytest.raises(UnsupportedError):
        gamma_for_point(pt(F(1, 2), field=PadicField(5)))


def test_ord_res_at_gauss_is_R():
    for p in (PHI1, PHI2, SQUARE):
        assert ord_res_at(p, TypeIIPoint.gauss(K)) == normalized_ord_res(p)


def test_ord_res_at_lattes_minima():
    assert ord_res_at(psi(3), pt(F(1, 4))) == 3
    assert ord_res_at(psi(2), pt(F(1, 3))) == F(2, 3)


@pytest.mark.parametrize("rho", [F(0), F(1, 3), F(1, 2), F(1), F(-1)])
def test_law_and_direct_determinant_agree(rho):
    for p in (PHI1, PHI2):
        z = pt(rho)
        assert ord_res_at(p, z) == ord_res_at(p, z, method="direct")


def test_segment_grid():
    seg = SegmentSpec(K.zero, F(1, 3), F(1), 4)
    assert seg.grid() == [F(1, 3), F(1, 2), F(3, 4), F(1)]
    with pytest.raises(ValueError):
        SegmentSpec(K.zero, F(1), F(1), 4)


def test_minresloc_examples():
    p3 = min_res_loc_on_segment(psi(3), SegmentSpec(K.zero, 0, F(1, 2), 8))
    assert p3.argmin == [F(1, 4)] and p3.min_value == 3
    assert p3.left_slope_at_min < 0 < p3.right_slope_at_min
    p2 = min_res_loc_on_segment(psi(2), SegmentSpec(K.zero, 0, F(1, 2), 12))
    assert p2.argmin == [F(1, 3)] and p2.min_value == F(2, 3)
    sq = min_res_loc_on_segment(SQUARE, SegmentSpec(K.zero, 0, 1, 4))
    assert sq.argmin == [0] and sq.min_value == 0 and sq.boundary_minimum


def test_profile_is_convex_with_positive_breaks():
    prof = ord_res_profile(psi(3), SegmentSpec(K.zero, 0, F(1, 2), 8))
    assert all(b > a for a, b in zip(prof.slopes, prof.slopes[1:]) if a != b)
    assert all(b.right_slope > b.left_slope for b in prof.breakpoints)


def test_crucial_weights_psi3():
    prof = ord_res_profile(psi(3), SegmentSpec(K.zero, 0, F(1, 2), 8))
    assert crucial_weights(prof, 9) == [(F(1, 4), 4)]
    assert segment_weights(prof, 9) == [(0, 2), (F(1, 4), 4), (F(1, 2), 2)]


def test_crucial_weights_psi2_on_fixed_point_hull():
    prof = ord_res_profile(psi(2), SegmentSpec(K.zero, 0, F(1, 2), 12))
    hull = restrict_profile(prof, 0, F(1, 3))
    assert segment_weights(hull, 4) == [(0, 1), (F(1, 3), 2)]


def test_affine_profile_has_no_breaks():
    prof = ord_res_profile(PHI1, SegmentSpec(K.zero, 0, 1, 6))
    assert crucial_weights(prof) == []


def test_adjacent_breaks_need_refinement():
    # psi_4 breaks at 1/3, between the grid points 13/40 and 14/40
    prof = ord_res_profile(psi(4, 24), SegmentSpec(K.zero, F(3, 10), F(2, 5), 40))
    with pytest.raises(RefineGridError) as info:
        crucial_weights(prof, 16)
    assert info.value.interval == (F(13, 40), F(7, 20))


def test_endpoint_masses_formula():
    prof = ord_res_profile(psi(3), SegmentSpec(K.zero, 0, F(1, 2), 8))
    ends = endpoint_masses(prof, 9)
    assert ends["lower"]["slope"] == -36 and ends["lower"]["mass"] == 2
    assert ends["upper"]["slope"] == 36 and ends["upper"]["mass"] == 2


def test_hsia_examples():
    assert log_hsia_gauss(pt(F(1, 3)), pt(F(1, 3))) == F(1, 3)
    assert log_hsia_gauss(pt(F(1, 4)), pt(F(1, 2))) == F(1, 4)
    assert log_hsia_gauss(pt(1, 1), pt(1, 0)) == 0
    with pytest.raises(UnsupportedError):
        log_hsia_gauss(pt(-1), pt(0))


def test_ghat_examples():
    w3 = [(pt(0), 2), (pt(F(1, 4)), 4), (pt(F(1, 2)), 2)]
    assert g_hat_eval(w3, 8, TypeIIPoint.gauss(K)) == 0
    assert g_hat_eval(w3, 8, pt(F(1, 4))) == F(-1, 8)
    w2 = [(pt(0), 1), (pt(F(1, 3)), 2)]
    assert g_hat_eval(w2, 3, pt(F(1, 3))) == F(-1, 9)


@settings(max_examples=60)
@given(st.fractions(0, 3, max_denominator=6), st.fractions(0, 3, max_denominator=6),
       st.integers(-3, 3), st.integers(-3, 3))
def test_hsia_symmetric_and_bounded(r1, r2, a, b):
    field = LaurentField(K.residue, 6)
    x = TypeIIPoint(field.monomial(a, 1) if a else field.zero, r1)
    y = TypeIIPoint(field.monomial(b, 2) if b else field.zero, r2)
    h = log_hsia_gauss(x, y)
    assert h == log_hsia_gauss(y, x)
    assert 0 <= h <= min(r1, r2)
