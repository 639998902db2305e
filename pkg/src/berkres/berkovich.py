"""Type II points, the ordRes function, and its slope data along segments.

Radii are recorded as ``rho = -log_v r`` in ord units, so the Gauss point is
``rho = 0`` and moving toward ``0`` increases ``rho``.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Optional

from .errors import ConvexityError, RefineGridError, UnsupportedError
from .maps import (
    HomogeneousPair,
    MobiusTransform,
    conjugate,
    conjugate_ord_res,
    normalized_ord_res,
    resultant_ord,
)
from .valued import INF, as_fraction


@dataclass(frozen=True, eq=False)
class TypeIIPoint:
    """The point ``zeta_{a, rho}``: the sup-norm on the disc ``ord(z - a) >= rho``."""

    center: object
    rho: Fraction

    def __post_init__(self):
        object.__setattr__(self, "rho", as_fraction(self.rho))

    @classmethod
    def gauss(cls, field) -> "TypeIIPoint":
        return cls(field.zero, Fraction(0))

    def __eq__(self, other):
        if not isinstance(other, TypeIIPoint) or other.rho != self.rho:
            return False
        return (self.center - other.center).ord() >= self.rho

    def __hash__(self):
        return hash(self.rho)

    def __str__(self):
        return f"zeta({self.center}, {self.rho})"


def gamma_for_point(zeta: TypeIIPoint) -> MobiusTransform:
    """Matrix of ``z -> t^rho z + a``, which carries the Gauss point to ``zeta``."""
    field = zeta.center.field
    if field.kind == "padic" and zeta.rho.denominator != 1:
        raise UnsupportedError(
            f"radius exponent {zeta.rho} needs ramification; the p-adic backend is unramified"
        )
    if zeta.rho == 0 and zeta.center.is_zero():
        return MobiusTransform.identity(field)
    return MobiusTransform(field.uniformizer_power(zeta.rho), zeta.center, field.zero, field.one)


def ord_res_at(phi: HomogeneousPair, zeta: TypeIIPoint, res_ord=None, method: str = "law") -> Fraction:
    """``ordRes_phi(zeta)``: the normalized resultant ord of the conjugate moving the Gauss point to ``zeta``.

    ``method="law"`` uses the transformation law of the resultant and only
    needs the conjugate's coefficients; ``method="direct"`` takes the
    Sylvester determinant of the conjugate.
    """
    gamma = gamma_for_point(zeta)
    if method == "direct":
        return normalized_ord_res(conjugate(phi, gamma))
    if method != "law":
        raise ValueError(f"unknown method {method!r}")
    return conjugate_ord_res(phi, gamma, res_ord)


@dataclass(frozen=True)
class SegmentSpec:
    """Grid on the segment ``zeta_{a, lo} -- zeta_{a, hi}`` with spacing ``1/denominator``."""

    center: object
    lo: Fraction
    hi: Fraction
    denominator: int

    def __post_init__(self):
        object.__setattr__(self, "lo", as_fraction(self.lo))
        object.__setattr__(self, "hi", as_fraction(self.hi))
        if not self.lo < self.hi:
            raise ValueError("segment needs lo < hi")
        if self.denominator < 1:
            raise ValueError("grid denominator must be positive")

    def grid(self) -> list:
        D = self.denominator
        first = -(-self.lo.numerator * D // self.lo.denominator)
        out = [self.lo]
        k = first
        while Fraction(k, D) < self.hi:
            r = Fraction(k, D)
            if r > self.lo:
                out.append(r)
            k += 1
        out.append(self.hi)
        return out

    def point(self, rho) -> TypeIIPoint:
        return TypeIIPoint(self.center, rho)


@dataclass(frozen=True)
class Breakpoint:
    rho: Fraction
    left_slope: Fraction
    right_slope: Fraction
    mass: Fraction


@dataclass
class OrdResProfile:
    """Exact values of ordRes on a grid, with slopes and the minimizing set."""

    segment: SegmentSpec
    degree: int
    samples: list
    slopes: list
    breakpoints: list
    argmin: list
    min_value: Fraction
    boundary_minimum: bool
    left_slope_at_min: Optional[Fraction] = None
    right_slope_at_min: Optional[Fraction] = None
    notes: list = dc_field(default_factory=list)

    def value_at(self, rho) -> Fraction:
        rho = as_fraction(rho)
        for r, v in self.samples:
            if r == rho:
                return v
        raise KeyError(rho)

    def to_json(self) -> dict:
        return {
            "segment": {"center": str(self.segment.center), "lo": self.segment.lo,
                        "hi": self.segment.hi, "denominator": self.segment.denominator},
            "degree": self.degree,
            "samples": [{"rho": r, "value": v} for r, v in self.samples],
            "breakpoints": [
                {"rho": b.rho, "left_slope": b.left_slope, "right_slope": b.right_slope, "mass": b.mass}
                for b in self.breakpoints
            ],
            "argmin": list(self.argmin),
            "min_value": self.min_value,
            "boundary_minimum": self.boundary_minimum,
            "left_slope_at_min": self.left_slope_at_min,
            "right_slope_at_min": self.right_slope_at_min,
        }


def ord_res_profile(phi: HomogeneousPair, seg: SegmentSpec) -> OrdResProfile:
    """Evaluate ordRes on the grid of ``seg`` and extract its convex structure."""
    res = resultant_ord(phi)
    samples = [(r, ord_res_at(phi, seg.point(r), res_ord=res)) for r in seg.grid()]
    return _profile_from_samples(seg, phi.degree, samples)


def restrict_profile(profile: OrdResProfile, lo, hi) -> OrdResProfile:
    """The profile of the sub-segment ``[lo, hi]``, reusing the computed samples."""
    seg = SegmentSpec(profile.segment.center, lo, hi, profile.segment.denominator)
    samples = [(r, v) for r, v in profile.samples if seg.lo <= r <= seg.hi]
    if samples[0][0] != seg.lo or samples[-1][0] != seg.hi:
        raise ValueError(f"[{lo}, {hi}] does not have grid endpoints")
    return _profile_from_samples(seg, profile.degree, samples)


def _profile_from_samples(seg: SegmentSpec, d: int, samples: list) -> OrdResProfile:
    grid = [r for r, _ in samples]
    slopes = [
        (samples[i + 1][1] - samples[i][1]) / (samples[i + 1][0] - samples[i][0])
        for i in range(len(samples) - 1)
    ]
    for i in range(len(slopes) - 1):
        if slopes[i + 1] < slopes[i]:
            raise ConvexityError(
                f"ordRes is not convex at rho = {grid[i + 1]}: slopes {slopes[i]} then {slopes[i + 1]}"
            )
    breaks = []
    for i in range(1, len(samples) - 1):
        left, right = slopes[i - 1], slopes[i]
        if right != left:
            breaks.append(Breakpoint(grid[i], left, right, (right - left) / (2 * d)))
    vmin = min(v for _, v in samples)
    argmin = [r for r, v in samples if v == vmin]
    i_lo = grid.index(argmin[0])
    i_hi = grid.index(argmin[-1])
    left = slopes[i_lo - 1] if i_lo > 0 else None
    right = slopes[i_hi] if i_hi < len(slopes) else None
    boundary = left is None or right is None
    return OrdResProfile(seg, d, samples, slopes, breaks, argmin, vmin, boundary, left, right)


def min_res_loc_on_segment(phi: HomogeneousPair, seg: SegmentSpec) -> OrdResProfile:
    """Minimize ordRes over the grid; interior minima are certified by the one-sided slopes."""
    profile = ord_res_profile(phi, seg)
    if profile.boundary_minimum:
        profile.notes.append("minimum attained at a segment endpoint; MinResLoc may extend beyond it")
    else:
        assert profile.left_slope_at_min <= 0 <= profile.right_slope_at_min
    return profile


def _check_isolated(profile: OrdResProfile) -> None:
    rhos = [b.rho for b in profile.breakpoints]
    grid = [r for r, _ in profile.samples]
    for a, b in zip(rhos, rhos[1:]):
        if grid.index(b) == grid.index(a) + 1:
            raise RefineGridError(
                f"slope changes at adjacent grid points {a} and {b}; refine the grid on [{a}, {b}]",
                interval=(a, b),
            )


def crucial_weights(profile: OrdResProfile, d: Optional[int] = None) -> list:
    """Interior point masses ``(rho, (right_slope - left_slope) / (2d))``."""
    d = d if d is not None else profile.degree
    _check_isolated(profile)
    return [(b.rho, (b.right_slope - b.left_slope) / (2 * d)) for b in profile.breakpoints]


def endpoint_masses(profile: OrdResProfile, d: Optional[int] = None) -> dict:
    """One-sided endpoint data, assuming the segment is the whole support tree.

    Each endpoint then has valence one and branching mass 1/2, giving
    ``(d-1)/2 + s/(2d)`` at the lower end (``s`` the outgoing slope) and
    ``(d-1)/2 - s/(2d)`` at the upper end (``s`` the incoming slope).
    """
    d = d if d is not None else profile.degree
    s_lo = profile.slopes[0]
    s_hi = profile.slopes[-1]
    (r_lo, _), (r_hi, _) = profile.samples[0], profile.samples[-1]
    half = Fraction(d - 1, 2)
    return {
        "lower": {"rho": r_lo, "slope": s_lo, "mass": half + s_lo / (2 * d)},
        "upper": {"rho": r_hi, "slope": s_hi, "mass": half - s_hi / (2 * d)},
    }


def segment_weights(profile: OrdResProfile, d: Optional[int] = None) -> list:
    """Endpoint and interior masses together, sorted by ``rho``, zero masses dropped."""
    ends = endpoint_masses(profile, d)
    out = [(ends["lower"]["rho"], ends["lower"]["mass"])]
    out += crucial_weights(profile, d)
    out.append((ends["upper"]["rho"], ends["upper"]["mass"]))
    return [(r, w) for r, w in out if w != 0]


def log_hsia_gauss(x: TypeIIPoint, y: TypeIIPoint) -> Fraction:
    """``-log_v delta(x, y)`` relative to the Gauss point, for points in the closed unit disc."""
    for p in (x, y):
        if p.rho < 0 or p.center.ord() < 0:
            raise UnsupportedError(f"{p} lies outside the closed unit disc")
    sep = (x.center - y.center).ord()
    out = min(x.rho, y.rho)
    if sep is not INF and sep < out:
        out = sep
    return out


def g_hat_eval(weights: list, total, x: TypeIIPoint) -> Fraction:
    """``rho_x - (2/total) * sum mass * log_hsia_gauss(x, zeta_i)`` in ord units."""
    total = as_fraction(total)
    acc = sum((as_fraction(w) * log_hsia_gauss(x, p) for p, w in weights), Fraction(0))
    return x.rho - 2 * acc / total
