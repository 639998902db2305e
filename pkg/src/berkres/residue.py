"""Binary forms over the residue field k.

A form of degree ``D`` is stored as its dehomogenization ``f(x) = F(x, 1)``
(a sympy ``Poly`` over ``QQ`` or ``GF(p)``) together with ``D``.  The power
of ``Y`` dividing ``F`` is ``D - deg f``, i.e. the multiplicity of the
point at infinity.  Factorization and gcds are delegated to sympy.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import sympy
from sympy import Poly, Symbol

from .valued import QQ, Fp, PrimeResidueField, RationalResidueField

_x = Symbol("x")


class _Bridge:
    def __init__(self, field):
        self.field = field
        if isinstance(field, PrimeResidueField):
            self.domain = sympy.GF(field.p, symmetric=False)
        else:
            self.domain = sympy.QQ

    def to_sympy(self, c):
        if isinstance(c, Fp):
            return sympy.Integer(c.v)
        c = Fraction(c)
        return sympy.Rational(c.numerator, c.denominator)

    def from_sympy(self, c):
        r = sympy.Rational(c)
        return self.field(Fraction(int(r.p), int(r.q)))

    def poly(self, coeffs_high_first) -> Poly:
        return Poly([self.to_sympy(c) for c in coeffs_high_first], _x, domain=self.domain)


_bridges: dict = {}


def bridge(field) -> _Bridge:
    b = _bridges.get(field)
    if b is None:
        b = _bridges[field] = _Bridge(field)
    return b


@dataclass(frozen=True)
class P1Point:
    """A point ``[x0 : x1]`` of P^1(k), normalized to ``[a:1]`` or ``[1:0]``."""

    x0: object
    x1: object

    @staticmethod
    def finite(a) -> "P1Point":
        one = 1 if not isinstance(a, Fp) else Fp(1, a.p)
        return P1Point(a, one)

    @staticmethod
    def infinity(field=QQ) -> "P1Point":
        return P1Point(field.one, field.zero)

    @staticmethod
    def from_pair(x0, x1) -> "P1Point":
        if not x1:
            if not x0:
                raise ValueError("[0:0] is not a point of P^1")
            return P1Point(x0 / x0, x1)
        return P1Point(x0 / x1, x1 / x1)

    @property
    def is_infinity(self) -> bool:
        return not self.x1

    def __str__(self):
        if self.is_infinity:
            return "oo"
        a = self.x0
        if isinstance(a, Fp):
            return str(a.v)
        a = Fraction(a)
        return str(a.numerator) if a.denominator == 1 else f"{a.numerator}/{a.denominator}"

    def sort_key(self):
        if self.is_infinity:
            return (1, 0)
        a = self.x0
        return (0, a.v if isinstance(a, Fp) else Fraction(a))


class Form:
    """Homogeneous binary form of formal degree ``degree`` over k."""

    __slots__ = ("f", "degree", "field")

    def __init__(self, f: Poly, degree: int, field):
        if not f.is_zero and f.degree() > degree:
            raise ValueError("dehomogenization exceeds the formal degree")
        self.f = f
        self.degree = degree
        self.field = field

    @classmethod
    def from_coeffs(cls, coeffs_high_first, field) -> "Form":
        """``coeffs_high_first[j]`` multiplies ``X^(D-j) Y^j``."""
        b = bridge(field)
        return cls(b.poly(coeffs_high_first), len(coeffs_high_first) - 1, field)

    @classmethod
    def linear(cls, c0, c1, field) -> "Form":
        """The form ``c1*X - c0*Y`` vanishing at ``[c0:c1]``."""
        return cls.from_coeffs([c1, -c0], field)

    def is_zero(self) -> bool:
        return self.f.is_zero

    def ord_infinity(self):
        """Multiplicity of ``[1:0]`` as a root, or None for the zero form."""
        if self.f.is_zero:
            return None
        return self.degree - self.f.degree()

    def coeffs(self) -> list:
        """Coefficients of ``X^D, X^(D-1) Y, ..., Y^D`` as residue elements."""
        b = bridge(self.field)
        out = [self.field.zero] * (self.degree + 1)
        if self.f.is_zero:
            return out
        cs = self.f.all_coeffs()
        top = self.f.degree()
        for i, c in enumerate(cs):
            out[self.degree - top + i] = b.from_sympy(c)
        return out

    def __call__(self, pt: P1Point):
        b = bridge(self.field)
        if pt.is_infinity:
            if self.f.is_zero or self.f.degree() < self.degree:
                return self.field.zero
            return b.from_sympy(self.f.LC())
        return b.from_sympy(self.f.eval(b.to_sympy(pt.x0)))

    def multiplicity(self, direction) -> int:
        """Root multiplicity of a point (or irreducible factor) in this form."""
        if self.f.is_zero:
            raise ValueError("zero form has no root multiplicities")
        if isinstance(direction, P1Point):
            if direction.is_infinity:
                return self.ord_infinity()
            b = bridge(self.field)
            lin = Poly([1, -b.to_sympy(direction.x0)], _x, domain=b.domain)
            return _multiplicity(self.f, lin)
        return _multiplicity(self.f, direction)

    def __mul__(self, other: "Form") -> "Form":
        return Form(self.f * other.f, self.degree + other.degree, self.field)

    def __sub__(self, other: "Form") -> "Form":
        if other.degree != self.degree:
            raise ValueError("forms of different degree")
        return Form(self.f - other.f, self.degree, self.field)

    def scale(self, c) -> "Form":
        b = bridge(self.field)
        return Form(self.f * b.to_sympy(c), self.degree, self.field)

    def times_x(self) -> "Form":
        return Form(self.f * Poly(_x, _x, domain=self.f.domain), self.degree + 1, self.field)

    def times_y(self) -> "Form":
        return Form(self.f, self.degree + 1, self.field)

    def __eq__(self, other):
        return isinstance(other, Form) and self.degree == other.degree and self.f == other.f

    def __repr__(self):
        return f"Form({self.f.as_expr()}, degree={self.degree})"

    def expr(self) -> str:
        """Human-readable homogeneous expression in X, Y."""
        X, Y = sympy.symbols("X Y")
        e = sympy.expand(sum(
            sympy.sympify(c if not isinstance(c, Fp) else c.v) * X ** (self.degree - j) * Y**j
            for j, c in enumerate(self.coeffs()) if c
        ))
        return str(e) if e != 0 else "0"


def _multiplicity(f: Poly, g: Poly) -> int:
    n = 0
    while True:
        q, r = f.div(g)
        if not r.is_zero:
            return n
        f = q
        n += 1


@dataclass(frozen=True)
class Hole:
    """A root of the gcd factor: a k-rational point or an irreducible factor."""

    depth: int
    point: Optional[P1Point] = None
    factor: Optional[Poly] = None

    @property
    def degree(self) -> int:
        return 1 if self.point is not None else self.factor.degree()

    def label(self) -> str:
        if self.point is not None:
            return str(self.point)
        return str(self.factor.as_expr())


def hom_gcd(F: Form, G: Form) -> Form:
    """Monic homogeneous gcd of two forms (not both zero)."""
    if F.is_zero() and G.is_zero():
        raise ValueError("gcd of two zero forms")
    g = F.f.gcd(G.f)
    if not g.is_zero:
        g = g.monic()
    e_f, e_g = F.ord_infinity(), G.ord_infinity()
    e = min(x for x in (e_f, e_g) if x is not None)
    return Form(g, g.degree() + e, F.field)


def exact_quotient(F: Form, A: Form) -> Form:
    q, r = F.f.div(A.f)
    if not r.is_zero:
        raise ArithmeticError("form is not divisible")
    return Form(q, F.degree - A.degree, F.field)


def holes_of(A: Form) -> list:
    """Factor ``A`` into holes; rational roots first, sorted."""
    out = []
    inf = A.ord_infinity()
    if inf:
        out.append(Hole(inf, point=P1Point.infinity(A.field)))
    if A.f.degree() > 0:
        b = bridge(A.field)
        _, factors = A.f.factor_list()
        for fac, mult in factors:
            fac = fac.monic()
            if fac.degree() == 1:
                root = b.from_sympy(-fac.all_coeffs()[1])
                out.append(Hole(mult, point=P1Point.finite(root)))
            else:
                out.append(Hole(mult, factor=fac))
    out.sort(key=_hole_key)
    return out


def _hole_key(h: Hole):
    if h.point is not None:
        return (0, h.point.sort_key(), "")
    return (1, (h.factor.degree(), 0), str(h.factor.as_expr()))


def rational_roots(F: Form) -> list:
    """``(point, multiplicity)`` over P^1(k), plus the degree left unlocated."""
    if F.is_zero():
        raise ValueError("zero form")
    return [(h.point, h.depth) for h in holes_of(F) if h.point is not None]


def factor_shares_root(factor: Poly, F: Form) -> bool:
    """Whether an irreducible factor divides the form ``F`` (zero form: yes)."""
    if F.is_zero():
        return True
    return F.f.gcd(factor).degree() > 0
