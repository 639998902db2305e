"""Direction counts at the Gauss point and the residue measure on P^1(k)."""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Optional

from .berkovich import TypeIIPoint, gamma_for_point
from .errors import ResampleError, UnsupportedError
from .maps import HomogeneousPair, ReductionReport, conjugate, normalize, reduce
from .residue import Form, Hole, P1Point, rational_roots


@dataclass(frozen=True)
class DirectionMass:
    """Mass bounds for one tangent direction at the Gauss point.

    ``conjugates`` is the number of Galois-conjugate directions sharing this
    entry when the direction is an irreducible factor rather than a k-point;
    the bounds are then per direction.
    """

    direction: object
    mass_lower: Fraction
    mass_upper: Fraction
    conjugates: int = 1

    def label(self) -> str:
        if isinstance(self.direction, P1Point):
            return str(self.direction)
        return str(self.direction.as_expr())

    def to_json(self) -> dict:
        return {"direction": self.label(), "lower": self.mass_lower, "upper": self.mass_upper,
                "conjugates": self.conjugates}


@dataclass
class ResidueMeasure:
    masses: list
    tail: Fraction
    n_max: int
    residue_degree: int
    notes: list = dc_field(default_factory=list)

    def __iter__(self):
        return iter(self.masses)

    def __len__(self):
        return len(self.masses)

    def lower_total(self) -> Fraction:
        return sum((m.mass_lower * m.conjugates for m in self.masses), Fraction(0))

    def to_json(self) -> dict:
        return {"masses": [m.to_json() for m in self.masses], "tail": self.tail, "n_max": self.n_max,
                "residue_degree": self.residue_degree}


def _lift_target(y: P1Point):
    return y.x0, y.x1


def _reduced_target_form(pair: HomogeneousPair, y: P1Point) -> Form:
    pair, _ = normalize(pair)
    residue = pair.field.residue
    y0, y1 = _lift_target(y)
    coeffs = [y1 * a.reduce_at(0) - y0 * b.reduce_at(0) for a, b in zip(pair.num, pair.den)]
    return Form.from_coeffs(coeffs, residue)


def direction_preimage_count(phi: HomogeneousPair, y: P1Point, direction) -> int:
    """Number of preimages of a unit-height lift of ``y`` in the open ball of ``direction``.

    Equal to the multiplicity of ``direction`` in the reduction of
    ``y1 F - y0 G``; ``direction`` may also be an irreducible factor.
    """
    H = _reduced_target_form(phi, y)
    if H.is_zero():
        raise ResampleError(f"target {y} is not generic: y1 F - y0 G reduces to zero")
    if isinstance(direction, Hole):
        direction = direction.point if direction.point is not None else direction.factor
    return H.multiplicity(direction)


def admissible_targets(report: ReductionReport, direction, count: int = 1) -> list:
    """Smallest nonnegative integer residue points avoiding the image direction."""
    excluded = []
    c = report.constant_value()
    if c is not None:
        excluded.append(c)
    elif isinstance(direction, P1Point):
        excluded.append(report.residue_map(direction))
    out = []
    residue = report.gcd_factor.field
    for a in residue.enumerate():
        pt = P1Point.finite(a)
        if pt in excluded:
            continue
        if not isinstance(direction, P1Point) and report.residue_degree > 0:
            # image of a non-rational direction: avoid targets whose preimage form shares the factor
            H = report.residue_num.scale(pt.x1) - report.residue_den.scale(pt.x0)
            if not H.is_zero() and H.f.gcd(direction).degree() > 0:
                continue
        out.append(pt)
        if len(out) == count:
            return out
    raise UnsupportedError("residue field too small to choose an admissible target")


def surplus_multiplicity(phi: HomogeneousPair, direction, report: Optional[ReductionReport] = None,
                         y: Optional[P1Point] = None) -> int:
    """Surplus multiplicity ``s`` at the Gauss point in ``direction``."""
    if report is None:
        report = reduce(phi)
    if isinstance(direction, Hole):
        direction = direction.point if direction.point is not None else direction.factor
    if y is None:
        (y,) = admissible_targets(report, direction)
    return direction_preimage_count(phi, y, direction)


def residue_measure(phi: HomogeneousPair, n_max: int = 6) -> ResidueMeasure:
    """Residue measure on P^1(k) with an unlocated ``tail``.

    For a nonconstant residue map the masses are ``sum_n d^-(n+1)`` times the
    hole multiplicities pulled back ``n`` times.  When the rational backward
    orbit of the holes closes up within ``n_max`` steps the series is summed
    exactly; otherwise it is cut at ``n_max``.  Non-rational preimages always
    land in the tail.
    """
    report = reduce(phi)
    if report.in_indeterminacy:
        raise UnsupportedError("reduction lies in I(d); the residue measure is not defined there")
    d = report.degree
    if report.good_reduction:
        return ResidueMeasure([], Fraction(0), n_max, report.residue_degree,
                              ["good reduction: zero measure"])
    acc: dict = {}
    factor_masses = []
    if report.residue_degree == 0:
        for h in report.holes:
            s = surplus_multiplicity(phi, h, report)
            if h.point is not None:
                acc[h.point] = Fraction(s, d)
            else:
                factor_masses.append((h.factor, Fraction(s, d), h.degree))
        tail = Fraction(0)
    else:
        c0: dict = {}
        for h in report.holes:
            if h.point is not None:
                c0[h.point] = c0.get(h.point, 0) + h.depth
            else:
                factor_masses.append((h.factor, Fraction(h.depth, d), h.degree))
        closed = _preimage_closure(report, list(c0), n_max)
        if closed is not None:
            acc = _sum_series_exactly(d, c0, closed)
        else:
            acc = _sum_series_truncated(report, d, c0, n_max)
        accounted = sum(acc.values(), Fraction(0)) + sum(m * k for _, m, k in factor_masses)
        tail = 1 - accounted
    masses = [DirectionMass(pt, m, m + tail) for pt, m in sorted(acc.items(), key=lambda kv: kv[0].sort_key())]
    masses += [DirectionMass(f, m, m + tail, k) for f, m, k in
               sorted(factor_masses, key=lambda x: (x[0].degree(), str(x[0].as_expr())))]
    return ResidueMeasure(masses, tail, n_max, report.residue_degree)


def _rational_preimages(report: ReductionReport, pt: P1Point) -> list:
    H = report.residue_num.scale(pt.x1) - report.residue_den.scale(pt.x0)
    return rational_roots(H)


def _preimage_closure(report: ReductionReport, start: list, levels: int):
    """Preimage multiplicities on the rational backward orbit of ``start``, if it closes up within ``levels`` steps."""
    table = {}
    frontier = list(start)
    for _ in range(levels + 1):
        new = []
        for pt in frontier:
            if pt in table:
                continue
            table[pt] = _rational_preimages(report, pt)
            new.extend(z for z, _ in table[pt] if z not in table)
        if not new:
            return table
        frontier = new
    return None


def _sum_series_exactly(d: int, c0: dict, table: dict) -> dict:
    """Solve ``(d I - T) m = c0`` where ``T[z][w]`` is the multiplicity of ``z`` over ``w``."""
    pts = sorted(table, key=lambda p: p.sort_key())
    idx = {p: i for i, p in enumerate(pts)}
    n = len(pts)
    M = [[Fraction(d) if i == j else Fraction(0) for j in range(n)] + [Fraction(c0.get(pts[i], 0))]
         for i in range(n)]
    for w, pre in table.items():
        for z, mult in pre:
            M[idx[z]][idx[w]] -= mult
    for k in range(n):
        piv = next(i for i in range(k, n) if M[i][k])
        M[k], M[piv] = M[piv], M[k]
        inv = 1 / M[k][k]
        M[k] = [x * inv for x in M[k]]
        for i in range(n):
            if i != k and M[i][k]:
                f = M[i][k]
                M[i] = [a - f * b for a, b in zip(M[i], M[k])]
    return {p: M[idx[p]][n] for p in pts if M[idx[p]][n]}


def _sum_series_truncated(report: ReductionReport, d: int, c0: dict, n_max: int) -> dict:
    acc: dict = {}
    level = dict(c0)
    for n in range(n_max + 1):
        w = Fraction(1, d ** (n + 1))
        for pt, mult in level.items():
            acc[pt] = acc.get(pt, Fraction(0)) + w * mult
        if n == n_max:
            break
        nxt: dict = {}
        for pt, mult in level.items():
            for z, m in _rational_preimages(report, pt):
                nxt[z] = nxt.get(z, 0) + mult * m
        level = nxt
    return acc


def barycenter_contains_gauss(measure) -> str:
    """``"yes"``, ``"no"`` or ``"unknown"``: is every direction's mass at most 1/2?"""
    if isinstance(measure, ResidueMeasure):
        masses, tail = measure.masses, measure.tail
    else:
        masses = list(measure)
        tail = max((m.mass_upper - m.mass_lower for m in masses), default=Fraction(0))
    half = Fraction(1, 2)
    if any(m.mass_lower > half for m in masses):
        return "no"
    # directions carrying no located mass can still hold up to the tail
    if all(m.mass_upper <= half for m in masses) and tail <= half:
        return "yes"
    return "unknown"


@dataclass
class ConditionCResult:
    verdict: str
    witness: str
    point: TypeIIPoint
    in_indeterminacy: bool
    measure: Optional[ResidueMeasure] = None

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "witness": self.witness,
                "point": {"center": str(self.point.center), "rho": self.point.rho},
                "in_indeterminacy": self.in_indeterminacy,
                "measure": self.measure.to_json() if self.measure is not None else None}


def condition_C_check(phi: HomogeneousPair, zeta: TypeIIPoint, n_max: int = 6) -> ConditionCResult:
    """Is the Gauss point of the coordinate at ``zeta`` a barycenter point outside I(d)?"""
    conj, _ = normalize(conjugate(phi, gamma_for_point(zeta)))
    report = reduce(conj)
    if report.in_indeterminacy:
        return ConditionCResult("no", "in_indeterminacy", zeta, True)
    measure = residue_measure(conj, n_max)
    verdict = barycenter_contains_gauss(measure)
    if verdict == "yes":
        witness = "barycenter"
    elif verdict == "no":
        witness = "heavy_direction"
    else:
        witness = "tail_too_large"
    return ConditionCResult(verdict, witness, zeta, False, measure)
