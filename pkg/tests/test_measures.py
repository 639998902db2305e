import random
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from berkres.berkovich import TypeIIPoint
from berkres.errors import ResampleError, UnsupportedError
from berkres.maps import reduce
from berkres.measures import (
    DirectionMass,
    ResidueMeasure,
    admissible_targets,
    barycenter_contains_gauss,
    condition_C_check,
    direction_preimage_count,
    residue_measure,
    surplus_multiplicity,
)
from berkres.residue import Form, P1Point, holes_of
from conftest import HAAR5, K, PHI1, PHI2, SQUARE, psi, random_pair

F = Fraction
P = P1Point.finite
OO = P1Point.infinity()

pairs = st.tuples(st.integers(0, 10**6), st.sampled_from([2, 3])).map(
    lambda a: random_pair(random.Random(a[0]), a[1])
)


def total_count(phi, y) -> int:
    """Sum of direction counts over P^1(k) and the non-rational factor directions."""
    from berkres.measures import _reduced_target_form

    H = _reduced_target_form(phi, y)
    return sum(h.depth * h.degree for h in holes_of(H))


def test_direction_counts_examples():
    assert direction_preimage_count(SQUARE, P(F(0)), P(F(0))) == 2
    for a in (0, 1, -1):
        assert direction_preimage_count(PHI1, P(F(0)), P(F(a))) == 1
    assert direction_preimage_count(PHI1, P(F(0)), OO) == 0
    assert direction_preimage_count(PHI2, P(F(1)), P(F(0))) == 2


def test_nongeneric_target_is_rejected():
    # phi1 reduces to [X^3 - X Y^2 : 0]; the target oo gives the zero form
    with pytest.raises(ResampleError):
        direction_preimage_count(PHI1, OO, P(F(0)))


def test_surplus_examples():
    assert surplus_multiplicity(SQUARE, P(F(0))) == 0
    assert surplus_multiplicity(PHI1, P(F(0))) == 1
    assert surplus_multiplicity(PHI2, P(F(0))) == 2


def test_residue_measure_examples():
    m = residue_measure(PHI1)
    assert [(str(x.direction), x.mass_lower, x.mass_upper) for x in m] == [
        ("-1", F(1, 3), F(1, 3)), ("0", F(1, 3), F(1, 3)), ("1", F(1, 3), F(1, 3))]
    assert m.tail == 0
    with pytest.raises(UnsupportedError):
        residue_measure(PHI2)
    good = residue_measure(SQUARE)
    assert len(good) == 0 and good.tail == 0


def test_haar_measure_over_f5():
    # (z^5 - z)/t: every residue point of F_5 is a depth-1 hole of the constant map oo
    m = residue_measure(HAAR5)
    assert [str(x.direction) for x in m] == ["0", "1", "2", "3", "4"]
    assert all(x.mass_lower == F(1, 5) for x in m) and m.tail == 0
    assert barycenter_contains_gauss(m) == "yes"


def test_barycenter_verdicts():
    assert barycenter_contains_gauss(residue_measure(PHI1)) == "yes"
    assert barycenter_contains_gauss([DirectionMass(P(F(0)), F(1), F(1))]) == "no"
    assert barycenter_contains_gauss([DirectionMass(P(F(0)), F(1, 5), F(3, 5))]) == "unknown"


def test_condition_C_examples():
    assert condition_C_check(PHI1, TypeIIPoint.gauss(K)).verdict == "yes"
    c2 = condition_C_check(PHI2, TypeIIPoint.gauss(K))
    assert c2.verdict == "no" and c2.witness == "in_indeterminacy"
    c3 = condition_C_check(psi(3), TypeIIPoint(K.zero, F(1, 4)))
    assert c3.verdict == "yes"
    assert [(str(x.direction), x.mass_lower) for x in c3.measure] == [("0", F(1, 2)), ("oo", F(1, 2))]


def test_nonconstant_residue_map_exact_series():
    # psi_3 at its minimum has residue map of positive degree; the series closes up exactly
    conj_measure = condition_C_check(psi(3), TypeIIPoint(K.zero, F(1, 4))).measure
    assert conj_measure.residue_degree > 0 and conj_measure.tail == 0


@settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(pairs, st.integers(0, 6))
def test_direction_counts_sum_to_degree(phi, k):
    report = reduce(phi)
    for y in admissible_targets(report, P(F(0)), count=7)[k:k + 1]:
        try:
            assert total_count(phi, y) == phi.degree
        except ResampleError:
            pass


@settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(pairs)
def test_surplus_independent_of_target(phi):
    report = reduce(phi)
    for h in report.holes:
        direction = h.point if h.point is not None else h.factor
        y1, y2 = admissible_targets(report, direction, count=2)
        assert surplus_multiplicity(phi, h, report, y1) == surplus_multiplicity(phi, h, report, y2)


@settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(pairs)
def test_surplus_over_holes_of_constant_map(phi):
    report = reduce(phi)
    if report.residue_degree != 0 or report.in_indeterminacy:
        return
    total = sum(surplus_multiplicity(phi, h, report) * h.degree for h in report.holes)
    assert total == report.gcd_factor.degree


@settings(max_examples=30, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(pairs)
def test_measure_total_mass(phi):
    report = reduce(phi)
    if report.in_indeterminacy or report.good_reduction:
        return
    m = residue_measure(phi, n_max=4)
    assert m.lower_total() + m.tail == 1
    assert m.tail >= 0


@pytest.mark.parametrize("phi", [PHI1, HAAR5])
def test_surplus_sums_to_gcd_degree_on_corpus(phi):
    report = reduce(phi)
    assert sum(surplus_multiplicity(phi, h, report) * h.degree for h in report.holes) == phi.degree
