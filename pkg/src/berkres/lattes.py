"""Flexible Lattes maps on the Tate curve with q = t, and their closed-form invariants."""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from math import floor, gcd

from .berkovich import (
    SegmentSpec,
    TypeIIPoint,
    crucial_weights,
    endpoint_masses,
    g_hat_eval,
    min_res_loc_on_segment,
    restrict_profile,
    segment_weights,
)
from .errors import PrecisionError
from .maps import HomogeneousPair, MobiusTransform, conjugate, normalize, normalized_ord_res, resultant_ord
from .theorem import main_theorem_check
from .valued import INF, QQ, LaurentField, as_fraction


@dataclass(frozen=True)
class LattesSpec:
    m: int
    precision: int = 16
    residue: object = QQ

    def __post_init__(self):
        if self.m < 2:
            raise ValueError("m must be at least 2")
        if self.precision < 4:
            raise ValueError("Tate series precision must be at least 4")
        if self.residue.characteristic in (2, 3):
            raise ValueError("residue characteristic must avoid 2 and 3")

    @property
    def degree(self) -> int:
        return self.m * self.m

    @property
    def field(self) -> LaurentField:
        return LaurentField(self.residue)

    def doubled(self) -> "LattesSpec":
        return LattesSpec(self.m, 2 * self.precision, self.residue)


def default_precision(m: int) -> int:
    return 24 if m >= 4 else 16


# ---------------------------------------------------------------------------
# Tate series


def _divisor_power_series(k: int, P: int) -> list:
    """Coefficients ``c_0..c_P`` of ``s_k = sum_n n^k q^n / (1 - q^n)``."""
    c = [0] * (P + 1)
    for n in range(1, P + 1):
        for e in range(n, P + 1, n):
            c[e] += n**k
    return c


def tate_coefficients(P: int, field: LaurentField = None):
    """``b2 = 5 s3`` and ``b3 = (5 s3 + 7 s5)/12`` truncated after ``q^P``."""
    if P < 2:
        raise ValueError("need P >= 2")
    field = field or LaurentField()
    s3 = _divisor_power_series(3, P)
    s5 = _divisor_power_series(5, P)
    b2 = [5 * a for a in s3]
    b3 = [Fraction(5 * a + 7 * b, 12) for a, b in zip(s3, s5)]
    if b3[1] != 1 or b3[2] != 23 or b2[1] != 5 or b2[2] != 45:
        raise AssertionError("Tate series failed the low-order coefficient gate")
    to_scalar = lambda cs: sum((field.monomial(c, e) for e, c in enumerate(cs) if c), field.zero)
    return to_scalar(b2), to_scalar(b3)


def weierstrass_coefficients(P: int, field: LaurentField = None):
    """``(A, B)`` of ``y^2 = x^3 + A x + B`` with ``A = -(1/48 + b2)``, ``B = 1/864 + b2/12 - b3``."""
    field = field or LaurentField()
    b2, b3 = tate_coefficients(P, field)
    A = -(field.scalar(Fraction(1, 48)) + b2)
    B = field.scalar(Fraction(1, 864)) + b2 * field.scalar(Fraction(1, 12)) - b3
    return A, B


# ---------------------------------------------------------------------------
# univariate polynomials in x, coefficient lists low degree first


def _trim(p):
    while len(p) > 1 and p[-1].is_zero():
        p.pop()
    return p


def _padd(p, q):
    n = max(len(p), len(q))
    zero = (p or q)[0].field.zero
    return _trim([(p[i] if i < len(p) else zero) + (q[i] if i < len(q) else zero) for i in range(n)])


def _pneg(p):
    return [-c for c in p]


def _pmul(p, q):
    zero = p[0].field.zero
    out = [zero] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a.is_zero():
            continue
        for j, b in enumerate(q):
            if not b.is_zero():
                out[i + j] = out[i + j] + a * b
    return _trim(out)


def _pscale(c, p):
    return _trim([c * a for a in p])


def _ppow(p, e):
    out = [p[0].field.one]
    for _ in range(e):
        out = _pmul(out, p)
    return out


def division_polynomials(n_max: int, A, B) -> dict:
    """``f_n`` for ``0 <= n <= n_max`` with ``psi_n = f_n`` (n odd) or ``y f_n`` (n even)."""
    field = A.field
    s = field.scalar
    W = [B, A, field.zero, field.one]
    W2 = _pmul(W, W)
    f = {0: [field.zero], 1: [field.one], 2: [s(2)]}
    f[3] = _trim([-(A * A), B * s(12), A * s(6), field.zero, s(3)])
    f[4] = _trim([
        s(-4) * (s(8) * B * B + A * A * A),
        s(-16) * A * B,
        s(-20) * A * A,
        s(80) * B,
        s(20) * A,
        field.zero,
        s(4),
    ])
    half = field.scalar(Fraction(1, 2))
    for n in range(5, n_max + 1):
        k = n // 2
        if n % 2:
            left = _pmul(f[k + 2], _ppow(f[k], 3))
            right = _pmul(f[k - 1], _ppow(f[k + 1], 3))
            if k % 2 == 0:
                left = _pmul(W2, left)
            else:
                right = _pmul(W2, right)
            f[n] = _padd(left, _pneg(right))
        else:
            inner = _padd(_pmul(f[k + 2], _ppow(f[k - 1], 2)), _pneg(_pmul(f[k - 2], _ppow(f[k + 1], 2))))
            f[n] = _pscale(half, _pmul(f[k], inner))
    return f


def division_polynomial_lattes(m: int, A, B) -> HomogeneousPair:
    """The x-coordinate of multiplication by ``m`` as a homogeneous pair of degree ``m^2``."""
    if m < 2:
        raise ValueError("m must be at least 2")
    field = A.field
    f = division_polynomials(m + 1, A, B)
    W = [B, A, field.zero, field.one]
    x = [field.zero, field.one]
    if m % 2 == 0:
        den = _pmul(W, _pmul(f[m], f[m]))
        cross = _pmul(f[m - 1], f[m + 1])
    else:
        den = _pmul(f[m], f[m])
        cross = _pmul(W, _pmul(f[m - 1], f[m + 1]))
    num = _padd(_pmul(x, den), _pneg(cross))
    d = m * m
    pad = lambda p: [p[i] if i < len(p) else field.zero for i in range(d, -1, -1)]
    return HomogeneousPair(tuple(pad(num)), tuple(pad(den)))


def lattes_map(spec: LattesSpec) -> HomogeneousPair:
    """Normalized lift of ``psi_m``: the Lattes map conjugated by ``z -> z + 1/12``."""
    field = spec.field
    A, B = weierstrass_coefficients(spec.precision, field)
    phi = division_polynomial_lattes(spec.m, A, B)
    gamma = MobiusTransform(field.one, field.scalar(Fraction(1, 12)), field.zero, field.one)
    psi, _ = normalize(conjugate(phi, gamma))
    if resultant_ord(psi) is INF:
        raise PrecisionError(f"resultant of psi_{spec.m} vanishes at precision {spec.precision}")
    return psi


# ---------------------------------------------------------------------------
# closed forms


def tent_fixed_points(m: int) -> list:
    """Radius exponents of the ``m`` type II fixed points on ``[0, 1/2]``, cross-checked by branch solving."""
    closed = sorted(
        Fraction(i, 2 * (m + 1)) if i % 2 == 0 else Fraction(i - 1, 2 * (m - 1)) for i in range(1, m + 1)
    )
    solved = _tent_solve(m)
    if solved != closed:
        raise AssertionError(f"tent-map fixed points disagree for m = {m}: {closed} vs {solved}")
    return closed


def tent_map(m: int, rho) -> Fraction:
    """``rho -> distance from m*rho to the nearest integer``."""
    x = m * as_fraction(rho)
    frac = x - floor(x)
    return min(frac, 1 - frac)


def _tent_solve(m: int) -> list:
    out = set()
    for k in range(m):
        # rising branch: m rho - k = rho
        r = Fraction(k, m - 1)
        if 0 <= r <= Fraction(1, 2) and floor(m * r) in (k, k + 1) and tent_map(m, r) == r:
            out.add(r)
        # falling branch: k + 1 - m rho = rho
        r = Fraction(k + 1, m + 1)
        if 0 <= r <= Fraction(1, 2) and tent_map(m, r) == r:
            out.add(r)
    return sorted(out)


def tent_weights(m: int) -> list:
    """``(rho_i, w_i)`` with ``w_i = m-1`` (i odd), ``m+1`` (i even, i != m), ``m`` (i = m even)."""
    out = []
    for i in range(1, m + 1):
        if i % 2:
            out.append((Fraction(i - 1, 2 * (m - 1)), Fraction(m - 1)))
        elif i != m:
            out.append((Fraction(i, 2 * (m + 1)), Fraction(m + 1)))
        else:
            out.append((Fraction(i, 2 * (m + 1)), Fraction(m)))
    return sorted(out)


def closed_form_rho_star(m: int) -> Fraction:
    if m % 2:
        return Fraction(1, 4)
    if m % 4 == 0:
        return Fraction(m, 4 * (m + 1))
    return Fraction(m + 2, 4 * (m + 1))


def closed_form_gauss_resultant(m: int, ord_q=1) -> Fraction:
    return Fraction(m * m * (m * m - 1), 6) * ord_q


def closed_form_minimal_resultant(m: int, ord_q=1) -> Fraction:
    if m % 2:
        return Fraction(m * m * (m * m - 1), 24) * ord_q
    bracket = Fraction(m**5 + m**4 - 2 * m**3, 8 * (m + 1)) - Fraction(m * m * (m * m - 1), 6)
    return -bracket * ord_q


def closed_form_ghat_star(m: int, ord_q=1) -> Fraction:
    if m % 2:
        return Fraction(-1, 8) * ord_q
    return -Fraction(m**3 + m**2 - 2 * m, 8 * (m + 1) * (m * m - 1)) * ord_q


def periodic_bernoulli2(x) -> Fraction:
    x = as_fraction(x)
    f = x - floor(x)
    return f * f - f + Fraction(1, 6)


def elliptic_green_min(ord_q=1) -> Fraction:
    """Minimum of the elliptic local height, ``-B2(1/2)/2`` times ``ord q``."""
    return -periodic_bernoulli2(Fraction(1, 2)) / 2 * as_fraction(ord_q)


def lattes2_pair_green_min(ord_q=1) -> Fraction:
    """Minimum of the two-variable Green's function of ``psi_2``, ``-B2(1/2)`` times ``ord q``."""
    return -periodic_bernoulli2(Fraction(1, 2)) * as_fraction(ord_q)


# ---------------------------------------------------------------------------
# report


@dataclass
class _Run:
    precision: int
    R_gauss: Fraction
    profile: object
    weight_profile: object
    weights: list
    ghat_star: Fraction
    lemma_identity: bool
    lemma_failures: list
    off_tree: list
    off_tree_slopes: list


def weight_denominator(m: int, D: int) -> int:
    """Smallest multiple of ``D`` putting every tent fixed point on the grid."""
    out = D
    for r in tent_fixed_points(m):
        out = out * r.denominator // gcd(out, r.denominator)
    return out


def _run(spec: LattesSpec, D: int) -> _Run:
    psi = lattes_map(spec)
    field = spec.field
    d = spec.degree
    R = normalized_ord_res(psi)
    seg = SegmentSpec(field.zero, Fraction(0), Fraction(1, 2), D)
    profile = min_res_loc_on_segment(psi, seg)
    Dw = weight_denominator(spec.m, D)
    if Dw == D:
        full = profile
    else:
        full = min_res_loc_on_segment(psi, SegmentSpec(field.zero, Fraction(0), Fraction(1, 2), Dw))
    # the identity and the measure live on the tree spanned by the fixed points; along [0, 1/2]
    # that tree ends at the last tent fixed point (before 1/2 when m is even)
    h = max(tent_fixed_points(spec.m))
    hull = restrict_profile(full, Fraction(0), h)
    weights = segment_weights(hull, d)
    pts = [(TypeIIPoint(field.zero, r), w) for r, w in weights]
    total = Fraction(d - 1)
    failures = []
    off_tree = []
    for rho, value in full.samples:
        g = g_hat_eval(pts, total, TypeIIPoint(field.zero, rho))
        if value != d * (d - 1) * g + R:
            (failures if rho <= h else off_tree).append(rho)
    beyond = [s for (r, _), s in zip(full.samples, full.slopes) if r >= h]
    rho_star = profile.argmin[0]
    ghat = g_hat_eval(pts, total, TypeIIPoint(field.zero, rho_star))
    return _Run(spec.precision, R, profile, hull, weights, ghat, not failures, failures, off_tree, beyond)


def _fingerprint(run: _Run):
    return (run.R_gauss, tuple(run.weight_profile.samples), tuple(run.weights), run.ghat_star)


@dataclass
class LattesReport:
    m: int
    precision: int
    denominator: int
    entries: dict
    stable: bool
    lemma_identity: bool
    profile: object
    weights: list
    endpoint_data: dict
    iteration: object = None
    notes: list = dc_field(default_factory=list)
    off_tree_consistent: bool = True

    @property
    def all_match(self) -> bool:
        return (self.stable and self.lemma_identity and self.off_tree_consistent
                and all(e["match"] for e in self.entries.values()))

    @property
    def verdict(self) -> str:
        if not self.stable:
            return "inconclusive"
        return "all_match" if self.all_match else "mismatch"

    def value(self, key):
        return self.entries[key]["computed"]

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "degree": self.m * self.m,
            "precision": self.precision,
            "denominator": self.denominator,
            "entries": self.entries,
            "stable": self.stable,
            "lemma_identity": self.lemma_identity,
            "off_tree_consistent": self.off_tree_consistent,
            "weights": [{"rho": r, "mass": w} for r, w in self.weights],
            "endpoint_data": self.endpoint_data,
            "profile": self.profile.to_json(),
            "iteration": self.iteration.to_json() if self.iteration is not None else None,
            "all_match": self.all_match,
            "verdict": self.verdict,
            "notes": list(self.notes),
        }


def lattes_report(spec: LattesSpec, D: int, iterate_n: int = 0, verify_stability: bool = True,
                  scan_iterates: bool = False) -> LattesReport:
    """Compute the MinResLoc data of ``psi_m`` on ``[0, 1/2]`` and compare with the closed forms."""
    m, d = spec.m, spec.degree
    if D % closed_form_rho_star(m).denominator:
        raise ValueError(f"grid denominator {D} must put rho = {closed_form_rho_star(m)} on the grid")
    run = _run(spec, D)
    stable = True
    notes = []
    if verify_stability:
        run2 = _run(spec.doubled(), D)
        stable = _fingerprint(run) == _fingerprint(run2)
        if not stable:
            notes.append(f"values changed between precision {spec.precision} and {2 * spec.precision}")
    profile = run.profile
    rho_star = profile.argmin[0] if len(profile.argmin) == 1 else None
    R_min = profile.min_value

    def entry(computed, predicted):
        return {"computed": computed, "predicted": predicted, "match": computed == predicted}

    entries = {
        "R_gauss": entry(run.R_gauss, closed_form_gauss_resultant(m)),
        "minresloc_rho": entry(rho_star, closed_form_rho_star(m)),
        "minresloc_value": entry(R_min, closed_form_minimal_resultant(m)),
        "weights": entry(run.weights, [(r, w) for r, w in tent_weights(m)]),
        "ghat_at_star": entry(run.ghat_star, closed_form_ghat_star(m)),
        "min_green": entry(R_min / (d * (d - 1)), closed_form_minimal_resultant(m) / (d * (d - 1))),
    }
    if m % 2:
        entries["min_green_elliptic"] = entry(R_min / (d * (d - 1)), elliptic_green_min(1))
    else:
        notes.append(
            "for even m the minimal resultant of iterates grows faster than N*R; "
            f"R/(d(d-1)) = {R_min / (d * (d - 1))} while the Green's minimum is {elliptic_green_min(1)}"
        )
    report = LattesReport(m, spec.precision, D, entries, stable, run.lemma_identity, profile,
                          run.weights, endpoint_masses(run.weight_profile, d), notes=notes)
    if run.weight_profile.segment.denominator != D:
        notes.append(f"weights and the lemma identity use the refined grid 1/{run.weight_profile.segment.denominator}")
    if run.weight_profile.segment.hi != profile.segment.hi:
        notes.append(f"weights and the lemma identity are taken on the fixed-point hull [0, {run.weight_profile.segment.hi}]")
    if run.lemma_failures:
        notes.append(f"lemma identity failed at rho in {[str(r) for r in run.lemma_failures]}")
    if run.off_tree_slopes:
        leaves = all(s == d * d + d for s in run.off_tree_slopes)
        notes.append(
            f"beyond rho = {run.weight_profile.segment.hi} the slopes are {sorted(set(str(s) for s in run.off_tree_slopes))}"
            + ("; d^2 + d means no fixed point lies ahead, so the segment has left the fixed-point tree"
               if leaves else "; expected d^2 + d off the fixed-point tree")
        )
        report.off_tree_consistent = leaves
    if run.off_tree:
        notes.append(f"lemma identity is not claimed off the tree and fails at {len(run.off_tree)} grid points there")
    interior = crucial_weights(run.weight_profile, d)
    report.notes.append(f"interior masses {[(str(r), str(w)) for r, w in interior]}")
    if iterate_n >= 2:
        psi = lattes_map(spec)
        seg = SegmentSpec(spec.field.zero, Fraction(0), Fraction(1, 2), D)
        th = main_theorem_check(psi, iterate_n, seg, map_id=f"lattes m={m}", scan_iterates=scan_iterates)
        report.iteration = th
        expected = "holds" if m % 2 else "fails"
        entries["iteration_verdict"] = entry(th.verdict, expected)
    return report
