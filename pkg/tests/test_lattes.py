from fractions import Fraction

import pytest
import sympy

from berkres.lattes import (
    LattesSpec,
    closed_form_ghat_star,
    closed_form_minimal_resultant,
    closed_form_rho_star,
    division_polynomial_lattes,
    elliptic_green_min,
    lattes2_pair_green_min,
    lattes_report,
    periodic_bernoulli2,
    tate_coefficients,
    tent_fixed_points,
    tent_weights,
    weierstrass_coefficients,
)
from berkres.maps import normalized_ord_res, resultant, resultant_ord
from berkres.valued import INF
from conftest import K, psi

F = Fraction
q = sympy.Symbol("q")


def coeff(x, k):
    return x.reduce_at(k)


def test_tate_series_low_order():
    b2, b3 = tate_coefficients(8)
    assert [coeff(b2, k) for k in (1, 2)] == [5, 45]
    assert [coeff(b3, k) for k in (1, 2)] == [1, 23]
    # s3 = q + 9 q^2 + ...: 1 from n = 1 and 2^3 from n = 2
    assert coeff(b2, 2) / 5 == 9


def test_tate_series_against_sympy_expansion():
    P = 10
    b2, b3 = tate_coefficients(P)
    s = lambda k: sum(n**k * q**n / (1 - q**n) for n in range(1, P + 1))
    ref2 = sympy.series(5 * s(3), q, 0, P + 1).removeO()
    ref3 = sympy.series((5 * s(3) + 7 * s(5)) / 12, q, 0, P + 1).removeO()
    for k in range(P + 1):
        assert coeff(b2, k) == ref2.coeff(q, k)
        assert coeff(b3, k) == ref3.coeff(q, k)


def test_discriminant_is_q_times_eta24():
    P = 8
    A, B = weierstrass_coefficients(P)
    disc = (K.scalar(-16) * (K.scalar(4) * A * A * A + K.scalar(27) * B * B)).truncate(P + 1)
    eta = sympy.series(q * sympy.prod([(1 - q**n) ** 24 for n in range(1, P + 1)]), q, 0, P + 1).removeO()
    assert [coeff(disc, k) for k in range(P + 1)] == [eta.coeff(q, k) for k in range(P + 1)]
    assert [coeff(disc, k) for k in range(1, 6)] == [1, -24, 252, -1472, 4830]


def _as_rational_map(pair):
    x = sympy.Symbol("x")
    d = pair.degree
    num = sum(sympy.Rational(str(c.constant_value())) * x ** (d - i) for i, c in enumerate(pair.num))
    den = sum(sympy.Rational(str(c.constant_value())) * x ** (d - i) for i, c in enumerate(pair.den))
    return sympy.Lambda(x, num / den)


def _add(P1, P2, A):
    """Chord-tangent addition on y^2 = x^3 + A x + B (points never the identity here)."""
    (x1, y1), (x2, y2) = P1, P2
    lam = (3 * x1 * x1 + A) / (2 * y1) if (x1, y1) == (x2, y2) else (y2 - y1) / (x2 - x1)
    x3 = lam * lam - x1 - x2
    return x3, lam * (x1 - x3) - y1


@pytest.mark.parametrize("A,B,P", [(0, 17, (-2, 3)), (2, 3, (3, 6)), (0, -2, (3, 5))])
@pytest.mark.parametrize("m", [2, 3, 4])
def test_multiplication_map_matches_group_law(A, B, P, m):
    A, B = F(A), F(B)
    P = (F(P[0]), F(P[1]))
    assert P[1] ** 2 == P[0] ** 3 + A * P[0] + B
    Q = P
    for _ in range(m - 1):
        Q = _add(Q, P, A)
    phi = division_polynomial_lattes(m, K.scalar(A), K.scalar(B))
    assert phi.degree == m * m
    assert _as_rational_map(phi)(sympy.Rational(str(P[0]))) == sympy.Rational(str(Q[0]))


def test_duplication_formula():
    A, B = K.scalar(F(-1, 3)), K.scalar(F(5, 7))
    phi = division_polynomial_lattes(2, A, B)
    a, b = F(-1, 3), F(5, 7)
    expect_num = [1, 0, -2 * a, -8 * b, a * a]
    expect_den = [0, 4, 0, 4 * a, 4 * b]
    ratio = phi.num[0]
    assert [c for c in phi.num] == [ratio * K.scalar(e) for e in expect_num]
    assert [c for c in phi.den] == [ratio * K.scalar(e) for e in expect_den]


def test_singular_curve_is_degenerate():
    phi = division_polynomial_lattes(2, K.zero, K.zero)
    assert resultant_ord(phi) is INF


def test_numerator_monic_of_degree_m_squared():
    A, B = weierstrass_coefficients(8)
    phi = division_polynomial_lattes(3, A, B)
    assert phi.num[0] == K.one and phi.degree == 9


def test_lattes_resultants():
    assert normalized_ord_res(psi(2)) == 2
    assert normalized_ord_res(psi(3)) == 12
    A, B = weierstrass_coefficients(16)
    assert resultant(division_polynomial_lattes(2, A, B)).ord() == 2


def _tent(m, r):
    x = m * r
    return min(x % 1, 1 - x % 1)


@pytest.mark.parametrize("m", range(2, 11))
def test_tent_fixed_points_by_brute_force(m):
    grid = [F(k, 2 * (m - 1) * (m + 1)) for k in range((m - 1) * (m + 1) + 1)]
    assert tent_fixed_points(m) == [r for r in grid if _tent(m, r) == r]
    assert len(tent_fixed_points(m)) == m


def test_tent_examples():
    assert tent_fixed_points(2) == [0, F(1, 3)]
    assert tent_fixed_points(3) == [0, F(1, 4), F(1, 2)]
    assert tent_weights(3) == [(0, 2), (F(1, 4), 4), (F(1, 2), 2)]
    assert tent_weights(2) == [(0, 1), (F(1, 3), 2)]
    for m in range(2, 9):
        assert sum(w for _, w in tent_weights(m)) == m * m - 1


def test_closed_forms():
    assert closed_form_rho_star(3) == F(1, 4)
    assert closed_form_rho_star(2) == F(1, 3)
    assert closed_form_rho_star(4) == F(1, 5)
    assert closed_form_minimal_resultant(3) == 3
    assert closed_form_minimal_resultant(2) == F(2, 3)
    assert closed_form_minimal_resultant(4) == F(56, 5)
    assert closed_form_ghat_star(3) == F(-1, 8)
    assert closed_form_ghat_star(2) == F(-1, 9)


def test_bernoulli_and_green_minima():
    assert periodic_bernoulli2(F(1, 2)) == F(-1, 12)
    assert periodic_bernoulli2(0) == F(1, 6)
    assert periodic_bernoulli2(F(7, 3)) == periodic_bernoulli2(F(1, 3))
    assert elliptic_green_min(1) == F(1, 24)
    assert lattes2_pair_green_min(1) == F(1, 12)
    assert elliptic_green_min(3) == F(1, 8)


def test_report_m3_coarse_grid():
    rep = lattes_report(LattesSpec(3, 16), 8, verify_stability=False)
    assert rep.value("minresloc_rho") == F(1, 4) and rep.value("minresloc_value") == 3
    assert rep.value("weights") == [(0, 2), (F(1, 4), 4), (F(1, 2), 2)]
    assert rep.value("ghat_at_star") == F(-1, 8) and rep.value("min_green") == F(1, 24)
    assert rep.lemma_identity and rep.all_match


def test_report_m2_leaves_the_tree_at_one_third():
    rep = lattes_report(LattesSpec(2, 16), 12, iterate_n=2, scan_iterates=True)
    assert rep.value("weights") == [(0, 1), (F(1, 3), 2)]
    assert rep.lemma_identity and rep.off_tree_consistent
    assert rep.entries["iteration_verdict"]["computed"] == "fails"
    assert rep.all_match


def test_report_requires_rho_star_on_grid():
    with pytest.raises(ValueError):
        lattes_report(LattesSpec(3, 16), 6, verify_stability=False)


def test_spec_validation():
    with pytest.raises(ValueError):
        LattesSpec(1)
    with pytest.raises(ValueError):
        LattesSpec(3, 2)
