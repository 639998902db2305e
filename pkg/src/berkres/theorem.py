"""Checkers for the resultant power identity and the minimal-resultant iteration formula."""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Optional

from .berkovich import SegmentSpec, TypeIIPoint, gamma_for_point, min_res_loc_on_segment
from .errors import InconclusiveDomainError, UnsupportedError
from .maps import (
    HomogeneousPair,
    conjugate,
    iterate,
    iterate_min_ord,
    iteration_exponent,
    normalize,
    normalized_ord_res,
    reduce,
    reduce_iterate,
    resultant,
)
from .measures import condition_C_check

# above this iterate degree no Sylvester determinant is ever formed
MAX_DETERMINANT_DEGREE = 27


def resultant_power_identity_check(phi: HomogeneousPair, n: int) -> bool:
    """``Res(iterate(phi, n)) == +-Res(phi)^N`` as exact ring elements."""
    d = phi.degree
    if d**n > MAX_DETERMINANT_DEGREE:
        raise UnsupportedError(
            f"iterate degree {d ** n} exceeds {MAX_DETERMINANT_DEGREE}; use iteration_formula_check"
        )
    N = iteration_exponent(d, n)
    lhs = resultant(iterate(phi, n))
    rhs = resultant(phi) ** N
    return lhs == rhs or lhs == -rhs


@dataclass(frozen=True)
class IterationRecord:
    n: int
    N: int
    R1: Fraction
    Rn: Fraction
    predicted: Fraction
    semistable: Optional[bool] = None

    @property
    def match(self) -> bool:
        return self.Rn == self.predicted

    def to_json(self) -> dict:
        out = {"n": self.n, "N": self.N, "R1": self.R1, "Rn": self.Rn, "predicted": self.predicted,
               "match": self.match}
        if self.semistable is not None:
            out["semistable"] = self.semistable
        return out


def iteration_formula_check(phi: HomogeneousPair, n: int, r1=None) -> IterationRecord:
    """Compare ``R_(phi^n)`` with ``N R_phi`` using min-ord bookkeeping on the iterate."""
    pair, _ = normalize(phi)
    d = pair.degree
    if r1 is None:
        r1 = normalized_ord_res(pair)
    N = iteration_exponent(d, n)
    if n == 1:
        rn = r1
    else:
        rn = N * r1 - 2 * d**n * iterate_min_ord(pair, n)
    return IterationRecord(n, N, r1, rn, N * r1)


@dataclass
class PointCheck:
    point: TypeIIPoint
    R1: Fraction
    in_indeterminacy: bool
    records: list
    witnesses: list

    @property
    def holds(self) -> bool:
        return not self.witnesses

    def to_json(self) -> dict:
        return {"point": {"center": str(self.point.center), "rho": self.point.rho},
                "R1": self.R1, "in_indeterminacy": self.in_indeterminacy,
                "records": [r.to_json() for r in self.records],
                "holds": self.holds, "witnesses": list(self.witnesses)}


def _check_at(phi: HomogeneousPair, zeta: TypeIIPoint, n_max: int, r1=None) -> PointCheck:
    conj, _ = normalize(conjugate(phi, gamma_for_point(zeta)))
    report = reduce(conj)
    if r1 is None:
        r1 = normalized_ord_res(conj)
    witnesses = []
    if report.in_indeterminacy:
        witnesses.append("in_indeterminacy")
    records = [IterationRecord(1, 1, r1, r1, r1, report.semistable)]
    if not report.semistable:
        witnesses.append("not_semistable(n=1)")
    d = conj.degree
    for n in range(2, n_max + 1):
        m = iterate_min_ord(conj, n)
        N = iteration_exponent(d, n)
        rn = N * r1 - 2 * d**n * m
        ss = reduce_iterate(conj, n, min_ord_hint=m).semistable
        rec = IterationRecord(n, N, r1, rn, N * r1, ss)
        records.append(rec)
        if not ss:
            witnesses.append(f"iterate_not_semistable(n={n})")
        if not rec.match:
            witnesses.append(f"resultant_mismatch(n={n})")
    return PointCheck(zeta, r1, report.in_indeterminacy, records, witnesses)


@dataclass
class TheoremReport:
    """Outcome of the coordinate-wise check of the iteration formula."""

    map_id: str
    n_max: int
    segment: SegmentSpec
    minresloc: list
    min_value: Fraction
    checks: list
    given: list
    given_in_indeterminacy: bool
    condition_C: Optional[str] = None
    iterate_minima: dict = dc_field(default_factory=dict)
    notes: list = dc_field(default_factory=list)

    @property
    def point(self) -> TypeIIPoint:
        return self.checks[0].point

    @property
    def records(self) -> list:
        return self.checks[0].records

    @property
    def in_indeterminacy(self) -> bool:
        return any(c.in_indeterminacy for c in self.checks)

    @property
    def verdict(self) -> str:
        return "fails" if self.witnesses else "holds"

    @property
    def witnesses(self) -> list:
        out = []
        for c in self.checks:
            for w in c.witnesses:
                if w not in out:
                    out.append(w)
        for n, rec in sorted(self.iterate_minima.items()):
            if rec["value"] < rec["predicted"]:
                out.append(f"minimal_resultant_drop(n={n})")
        return out

    def to_json(self) -> dict:
        return {
            "map": self.map_id,
            "n_max": self.n_max,
            "segment": {"center": str(self.segment.center), "lo": self.segment.lo,
                        "hi": self.segment.hi, "denominator": self.segment.denominator},
            "minresloc": list(self.minresloc),
            "min_value": self.min_value,
            "verdict": self.verdict,
            "witnesses": self.witnesses,
            "in_indeterminacy": self.in_indeterminacy,
            "checks": [c.to_json() for c in self.checks],
            "given_coordinates": {"in_indeterminacy": self.given_in_indeterminacy,
                                  "records": [r.to_json() for r in self.given]},
            "condition_C": self.condition_C,
            "iterate_minima": {str(n): rec for n, rec in sorted(self.iterate_minima.items())},
            "notes": list(self.notes),
        }


def main_theorem_check(phi: HomogeneousPair, n_max: int, search: SegmentSpec,
                       map_id: str = "", measure_depth: int = 6, scan_iterates: bool = False) -> TheoremReport:
    """Locate MinResLoc on ``search``, then test semistability of iterates and the R formula there.

    With ``scan_iterates`` the iterates' resultants are also minimized over
    the grid; a grid value below ``N * R`` is a direct witness that the
    minimal resultant of the iterate drops.
    """
    profile = min_res_loc_on_segment(phi, search)
    checks = []
    for rho in profile.argmin:
        zeta = search.point(rho)
        c = _check_at(phi, zeta, n_max, r1=profile.min_value)
        if c.records[0].semistable:
            checks.append(c)
    if not checks:
        raise InconclusiveDomainError(
            f"no semistable grid point among the minimizers {[str(r) for r in profile.argmin]} on the search segment"
        )
    pair, _ = normalize(phi)
    given = [iteration_formula_check(pair, n) for n in range(1, n_max + 1)]
    report = TheoremReport(
        map_id=map_id,
        n_max=n_max,
        segment=search,
        minresloc=list(profile.argmin),
        min_value=profile.min_value,
        checks=checks,
        given=given,
        given_in_indeterminacy=reduce(pair).in_indeterminacy,
    )
    report.notes.append(f"iterates checked for n <= {n_max} only")
    report.notes.extend(profile.notes)
    if len(profile.argmin) > 1:
        report.notes.append("MinResLoc meets the grid in several points; only grid points were tested")
    report.condition_C = condition_C_check(phi, checks[0].point, measure_depth).verdict
    if scan_iterates:
        d = phi.degree
        for n in range(2, n_max + 1):
            prof = iterate_profile(phi, n, search)
            vmin = min(v for _, v in prof)
            report.iterate_minima[n] = {
                "argmin": [r for r, v in prof if v == vmin],
                "value": vmin,
                "predicted": iteration_exponent(d, n) * profile.min_value,
            }
    return report


def iterate_profile(phi: HomogeneousPair, n: int, search: SegmentSpec) -> list:
    """``(rho, R of the n-th iterate at zeta_rho)`` over the grid, via min-ord bookkeeping."""
    from .berkovich import ord_res_at
    from .maps import resultant_ord

    res = resultant_ord(phi)
    d = phi.degree
    N = iteration_exponent(d, n)
    out = []
    for rho in search.grid():
        zeta = search.point(rho)
        r1 = ord_res_at(phi, zeta, res_ord=res)
        conj, _ = normalize(conjugate(phi, gamma_for_point(zeta)))
        out.append((rho, N * r1 - 2 * d**n * iterate_min_ord(conj, n)))
    return out


def ss_iterate_implication_check(phi: HomogeneousPair, n: int) -> bool:
    """(iterate semistable and ``R_n = N R_1``) implies ``phi`` semistable."""
    pair, _ = normalize(phi)
    rec = iteration_formula_check(pair, n)
    m = (rec.N * rec.R1 - rec.Rn) / (2 * pair.degree**n)
    hypothesis = rec.match and reduce_iterate(pair, n, min_ord_hint=m).semistable
    return (not hypothesis) or reduce(pair).semistable
