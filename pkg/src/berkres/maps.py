"""Homogeneous lifts of rational maps and their reductions.

A map ``phi = F/G`` of degree ``d`` is carried as two coefficient tuples
``num = (a_d, ..., a_0)`` and ``den = (b_d, ..., b_0)`` with
``F = sum a_i X^i Y^(d-i)``.  Everything here is a polynomial operation on
those coefficients, so it stays exact.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Optional

from .errors import DegeneratePairError
from .residue import Form, Hole, P1Point, exact_quotient, factor_shares_root, hom_gcd, holes_of
from .resultants import det_exact, det_ord, sylvester_matrix
from .valued import INF, as_fraction


# ---------------------------------------------------------------------------
# forms over K, stored high-X-power first


def _fmul(p: list, q: list, below=None) -> list:
    zero = p[0].field.zero
    out = [zero] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a.is_zero():
            continue
        for j, b in enumerate(q):
            if b.is_zero():
                continue
            prod = a.mul(b, below=below)
            if not prod.is_zero():
                out[i + j] = out[i + j] + prod
    return out


def _fadd(p: list, q: list) -> list:
    return [a + b for a, b in zip(p, q)]


def _fscale(c, p: list, below=None) -> list:
    return [c.mul(a, below=below) for a in p]


def _compose(coeffs: list, P: list, Q: list, below=None) -> list:
    """``sum_i c_i P^i Q^(d-i)`` for ``coeffs = (c_d, ..., c_0)``."""
    d = len(coeffs) - 1
    ppow = [None] * (d + 1)
    qpow = [None] * (d + 1)
    zero = P[0].field.zero
    one = P[0].field.one
    ppow[0] = [one]
    qpow[0] = [one]
    for i in range(1, d + 1):
        ppow[i] = _fmul(ppow[i - 1], P, below)
        qpow[i] = _fmul(qpow[i - 1], Q, below)
    D = (len(P) - 1) * d
    out = [zero] * (D + 1)
    for idx, c in enumerate(coeffs):
        if c.is_zero():
            continue
        i = d - idx
        term = _fmul(ppow[i], qpow[d - i], below)
        out = _fadd(out, _fscale(c, term, below))
    return out


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MobiusTransform:
    """The matrix ``[[a, b], [c, d]]`` acting as ``z -> (a z + b)/(c z + d)``."""

    a: object
    b: object
    c: object
    d: object

    def __post_init__(self):
        if self.det().is_zero():
            raise ValueError("singular Mobius transformation")

    @classmethod
    def identity(cls, field) -> "MobiusTransform":
        return cls(field.one, field.zero, field.zero, field.one)

    @classmethod
    def affine(cls, scale, shift) -> "MobiusTransform":
        """``z -> scale*z + shift``."""
        f = scale.field
        return cls(scale, f.scalar(shift), f.zero, f.one)

    def det(self):
        return self.a * self.d - self.b * self.c

    def adjugate(self) -> "MobiusTransform":
        return MobiusTransform(self.d, -self.b, -self.c, self.a)

    def __matmul__(self, other: "MobiusTransform") -> "MobiusTransform":
        return MobiusTransform(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )


@dataclass(frozen=True)
class HomogeneousPair:
    """A lift ``[F, G]`` of a degree-``d`` rational map."""

    num: tuple
    den: tuple

    def __post_init__(self):
        if len(self.num) != len(self.den) or len(self.num) < 2:
            raise ValueError("numerator and denominator need d+1 >= 2 coefficients each")
        if all(c.is_zero() for c in self.num + self.den):
            raise ValueError("all coefficients vanish")

    @classmethod
    def from_strings(cls, field, num, den) -> "HomogeneousPair":
        return cls(tuple(field.scalar(c) for c in num), tuple(field.scalar(c) for c in den))

    @property
    def degree(self) -> int:
        return len(self.num) - 1

    @property
    def field(self):
        return self.num[0].field

    def coefficients(self) -> tuple:
        return self.num + self.den

    def min_ord(self):
        return min(c.ord() for c in self.coefficients())

    def scale(self, c) -> "HomogeneousPair":
        return HomogeneousPair(tuple(c * a for a in self.num), tuple(c * b for b in self.den))

    def shift(self, e) -> "HomogeneousPair":
        return HomogeneousPair(tuple(a.shift(e) for a in self.num), tuple(b.shift(e) for b in self.den))

    def truncate(self, below) -> "HomogeneousPair":
        return HomogeneousPair(tuple(a.truncate(below) for a in self.num),
                               tuple(b.truncate(below) for b in self.den))

    def __str__(self):
        return f"[{', '.join(map(str, self.num))} | {', '.join(map(str, self.den))}]"


# ---------------------------------------------------------------------------
# resultants


def resultant(pair: HomogeneousPair):
    """Exact Sylvester determinant of ``F`` and ``G`` (sign not normalized)."""
    return det_exact(sylvester_matrix(list(pair.num), list(pair.den)))


def resultant_ord(pair: HomogeneousPair):
    """``ord Res(F, G)``; ``INF`` for a degenerate pair."""
    return det_ord(sylvester_matrix(list(pair.num), list(pair.den)))


def normalize(pair: HomogeneousPair):
    """Scale by ``t^-m`` with ``m`` the minimum coefficient ord; returns ``(pair, m)``."""
    m = pair.min_ord()
    if m == 0:
        return pair, Fraction(0)
    return pair.shift(-m), m


def normalized_ord_res(pair: HomogeneousPair, res_ord=None) -> Fraction:
    """``R_phi = ord Res(F, G) - 2d min ord(coefficients)``."""
    if res_ord is None:
        res_ord = resultant_ord(pair)
    if res_ord is INF:
        raise DegeneratePairError("resultant vanishes: the pair is not a morphism")
    return res_ord - 2 * pair.degree * pair.min_ord()


def iterate(pair: HomogeneousPair, n: int, precision=None) -> HomogeneousPair:
    """Formal n-fold composition; with ``precision`` every coefficient is taken mod ``t^precision``.

    The truncated form is only meaningful for pairs with integral coefficients
    (min ord >= 0): reduction modulo ``t^M`` is then a ring homomorphism.
    """
    P, Q = _iterate_lists(pair, n, precision)
    return HomogeneousPair(tuple(P), tuple(Q))


def _iterate_lists(pair: HomogeneousPair, n: int, precision=None):
    if n < 1:
        raise ValueError("n must be >= 1")
    F, G = list(pair.num), list(pair.den)
    if precision is not None:
        F = [c.truncate(precision) for c in F]
        G = [c.truncate(precision) for c in G]
    P, Q = F, G
    for _ in range(n - 1):
        P, Q = _compose(F, P, Q, precision), _compose(G, P, Q, precision)
    return P, Q


def iterate_min_ord(pair: HomogeneousPair, n: int, start=None) -> Fraction:
    """Minimum coefficient ord of the n-th iterate of a normalized pair.

    Computed modulo ``t^M`` and exact whenever the answer is below ``M``;
    ``M`` doubles until that happens.
    """
    if pair.min_ord() != 0:
        raise ValueError("pair must be normalized")
    M = Fraction(start) if start is not None else Fraction(4)
    while True:
        P, Q = _iterate_lists(pair, n, precision=M)
        ords = [c.ord() for c in P + Q if not c.is_zero()]
        if ords:
            return min(ords)
        M *= 2
        if M > 1 << 20:
            raise DegeneratePairError("iterate vanishes identically")


def iterate_normalized_ord_res(pair: HomogeneousPair, n: int, r1=None) -> Fraction:
    """``R`` of the n-th iterate via the resultant power identity and min-ord bookkeeping."""
    pair, _ = normalize(pair)
    d = pair.degree
    if r1 is None:
        r1 = normalized_ord_res(pair)
    N = iteration_exponent(d, n)
    return N * r1 - 2 * d**n * iterate_min_ord(pair, n)


def iteration_exponent(d: int, n: int) -> int:
    """``N = d^n (d^n - 1) / (d (d - 1))``."""
    return d**n * (d**n - 1) // (d * (d - 1))


# ---------------------------------------------------------------------------
# conjugation


def conjugate(pair: HomogeneousPair, gamma: MobiusTransform) -> HomogeneousPair:
    """Lift of ``gamma^-1 o phi o gamma`` computed as ``adj(gamma) o Phi o gamma``."""
    lin_x = [gamma.a, gamma.b]  # a X + b Y
    lin_y = [gamma.c, gamma.d]  # c X + d Y
    Fg = _compose(list(pair.num), lin_x, lin_y)
    Gg = _compose(list(pair.den), lin_x, lin_y)
    adj = gamma.adjugate()
    num = _fadd(_fscale(adj.a, Fg), _fscale(adj.b, Gg))
    den = _fadd(_fscale(adj.c, Fg), _fscale(adj.d, Gg))
    if all(c.is_zero() for c in num + den):
        raise ValueError("conjugation produced the zero pair")
    return HomogeneousPair(tuple(num), tuple(den))


def conjugate_ord_res(pair: HomogeneousPair, gamma: MobiusTransform, res_ord=None) -> Fraction:
    """``R`` of the conjugate via ``ord Res(phi^gamma) = ord Res(phi) + (d^2 + d) ord det gamma``."""
    if res_ord is None:
        res_ord = resultant_ord(pair)
    if res_ord is INF:
        raise DegeneratePairError("resultant vanishes: the pair is not a morphism")
    d = pair.degree
    conj = conjugate(pair, gamma)
    return res_ord + (d * d + d) * gamma.det().ord() - 2 * d * conj.min_ord()


# ---------------------------------------------------------------------------
# reduction


@dataclass
class ReductionReport:
    """The picture of a normalized lift modulo the maximal ideal."""

    degree: int
    min_ord: Fraction
    reduced_num: Form
    reduced_den: Form
    gcd_factor: Form
    residue_num: Form
    residue_den: Form
    holes: list
    good_reduction: bool = False
    semistable: bool = False
    in_indeterminacy: bool = False
    threshold: Fraction = Fraction(0)
    notes: list = dc_field(default_factory=list)

    @property
    def residue_degree(self) -> int:
        return self.residue_num.degree

    def residue_map(self, pt: P1Point) -> P1Point:
        return P1Point.from_pair(self.residue_num(pt), self.residue_den(pt))

    def constant_value(self) -> Optional[P1Point]:
        if self.residue_degree != 0:
            return None
        return P1Point.from_pair(self.residue_num.coeffs()[0], self.residue_den.coeffs()[0])

    def fixed_point_form(self) -> Form:
        """``Y F0 - X G0``: its roots are the fixed points of the residue map."""
        return self.residue_num.times_y() - self.residue_den.times_x()

    def hole_is_fixed(self, hole: Hole) -> bool:
        fix = self.fixed_point_form()
        if hole.point is not None:
            return fix.is_zero() or not fix(hole.point)
        return factor_shares_root(hole.factor, fix)

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "min_ord": self.min_ord,
            "reduced_num": self.reduced_num.expr(),
            "reduced_den": self.reduced_den.expr(),
            "gcd_factor": self.gcd_factor.expr(),
            "residue_map": [self.residue_num.expr(), self.residue_den.expr()],
            "residue_degree": self.residue_degree,
            "holes": [{"hole": h.label(), "depth": h.depth, "degree": h.degree} for h in self.holes],
            "good_reduction": self.good_reduction,
            "semistable": self.semistable,
            "in_indeterminacy": self.in_indeterminacy,
            "threshold": self.threshold,
        }


def reduce(pair: HomogeneousPair) -> ReductionReport:
    """Normalize, reduce coefficientwise, and analyze holes and flags."""
    pair, m = normalize(pair)
    residue = pair.field.residue
    Ft = Form.from_coeffs([c.reduce_at(0) for c in pair.num], residue)
    Gt = Form.from_coeffs([c.reduce_at(0) for c in pair.den], residue)
    A = hom_gcd(Ft, Gt)
    F0 = exact_quotient(Ft, A)
    G0 = exact_quotient(Gt, A)
    report = ReductionReport(
        degree=pair.degree,
        min_ord=m,
        reduced_num=Ft,
        reduced_den=Gt,
        gcd_factor=A,
        residue_num=F0,
        residue_den=G0,
        holes=holes_of(A),
    )
    report.good_reduction = A.degree == 0
    report.threshold = semistability_threshold(pair.degree)
    report.in_indeterminacy = is_in_indeterminacy(report)
    report.semistable = is_semistable(report)
    return report


def semistability_threshold(d: int) -> Fraction:
    return Fraction(d, 2) if d % 2 == 0 else Fraction(d + 1, 2)


def is_in_indeterminacy(report: ReductionReport) -> bool:
    """Constant residue map whose value is a root of the gcd factor."""
    if report.gcd_factor.degree != report.degree:
        return False
    c = report.constant_value()
    return not report.gcd_factor(c)


def is_semistable(report: ReductionReport) -> bool:
    """Numerical criterion: hole depths bounded by the threshold, fixed boundary holes excluded."""
    T = semistability_threshold(report.degree)
    for h in report.holes:
        if h.depth > T:
            return False
        if h.depth == T and report.hole_is_fixed(h):
            return False
    return True


def reduce_iterate(pair: HomogeneousPair, n: int, min_ord_hint=None) -> ReductionReport:
    """Reduction of the n-th iterate, computed from a truncated iterate.

    Only coefficients up to exponent ``min ord`` matter, so the iterate is
    taken modulo ``t^(m + 1)`` where ``m`` is its minimum coefficient ord.
    """
    pair, _ = normalize(pair)
    if n == 1:
        return reduce(pair)
    m = min_ord_hint if min_ord_hint is not None else iterate_min_ord(pair, n)
    it = iterate(pair, n, precision=as_fraction(m) + 1)
    return reduce(it)
