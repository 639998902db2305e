"""Sylvester matrices and their determinants.

Two determinant routines are provided.  :func:`det_exact` returns the exact
determinant, working in a polynomial ring in ``t^(1/e)`` when the entries
are not constant.  :func:`det_ord` returns only ``ord det`` and works over the
truncated ring ``O / t^M`` with valuation pivoting, which keeps every entry
correct modulo ``t^M``; it is what makes large resultants affordable.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd

from sympy import GF, QQ as SymQQ
from sympy.polys.matrices import DomainMatrix

from .valued import INF, PadicScalar, PuiseuxScalar


def sylvester_matrix(num: list, den: list) -> list:
    """Sylvester matrix of two forms of formal degree ``d`` (coefficients ``a_d..a_0``)."""
    d = len(num) - 1
    if len(den) != d + 1:
        raise ValueError("forms must share the formal degree")
    size = 2 * d
    zero = _zero_like(num + den)
    rows = []
    for coeffs in (num, den):
        for shift in range(d):
            row = [zero] * size
            row[shift:shift + d + 1] = coeffs
            rows.append(row)
    return rows


def _zero_like(entries):
    for e in entries:
        if isinstance(e, (PuiseuxScalar, PadicScalar)):
            return e.field.zero
    return 0


def det_exact(rows: list):
    """Exact determinant: Gaussian elimination for constant entries, polynomial arithmetic otherwise."""
    n = len(rows)
    if n == 0:
        raise ValueError("empty matrix")
    field = _zero_like([e for r in rows for e in r]).field
    if field.kind == "padic":
        return field.scalar(_det_field([[e.value for e in r] for r in rows], Fraction(0)))
    if all(e.is_constant() for r in rows for e in r):
        value = _det_field([[e.constant_value() for e in r] for r in rows], field.residue.zero)
        return field.scalar(value)
    return _det_polynomial(rows, field)


def _det_polynomial(rows: list, field) -> PuiseuxScalar:
    """Determinant over ``k[s]`` with ``s = t^(1/e)``, after shifting every entry to nonnegative powers."""
    n = len(rows)
    e = 1
    low = 0
    for r in rows:
        for x in r:
            if not x.is_zero():
                e = e * x.ramification // gcd(e, x.ramification)
    for r in rows:
        for x in r:
            if not x.is_zero():
                low = min(low, min(x.lift(e)))
    p = getattr(field.residue, "p", None)
    dom = (GF(p) if p else SymQQ)["s"]
    ring = dom.ring

    def coeff(c):
        if p:
            return dom.dom(c.v)
        return SymQQ(c.numerator, c.denominator)

    m = [[ring.from_dict({(k - low,): coeff(c) for k, c in x.lift(e).items()}) if not x.is_zero() else ring.zero
          for x in r] for r in rows]
    det = DomainMatrix(m, (n, n), dom).det()
    residue = field.residue
    terms = {}
    for (k,), c in det.items():
        c = residue(int(c)) if p else Fraction(int(c.numerator), int(c.denominator))
        terms[k + n * low] = c
    return PuiseuxScalar(field, terms, e) if terms else field.zero


def _det_field(m: list, zero):
    """Gaussian elimination over a field (Fraction or F_p entries)."""
    m = [list(r) for r in m]
    n = len(m)
    det = zero + 1
    for k in range(n):
        piv = next((i for i in range(k, n) if m[i][k]), None)
        if piv is None:
            return zero
        if piv != k:
            m[k], m[piv] = m[piv], m[k]
            det = -det
        pk = m[k][k]
        det = det * pk
        inv = 1 / pk
        for i in range(k + 1, n):
            if m[i][k]:
                f = m[i][k] * inv
                row_i, row_k = m[i], m[k]
                for j in range(k + 1, n):
                    if row_k[j]:
                        row_i[j] = row_i[j] - f * row_k[j]
    return det


class PrecisionExhausted(ArithmeticError):
    """Valuation-pivoted elimination ran out of t-adic precision."""


def unit_inverse(u: PuiseuxScalar, below) -> PuiseuxScalar:
    """Inverse of a unit of O modulo ``t^below`` by Newton iteration."""
    field = u.field
    c0 = u.constant_value()
    if not c0 or u.ord() != 0:
        raise ValueError("not a unit")
    inv = field.scalar(1 / c0)
    below = Fraction(below)
    step = Fraction(1, u.ramification)
    two = field.scalar(2)
    while True:
        step = min(2 * step, below)
        inv = inv.mul(two - u.mul(inv, below=step), below=step)
        if step >= below:
            return inv


def _det_ord_truncated(rows: list, M) -> Fraction:
    """``ord det`` of a matrix with entries of ord >= 0, known modulo ``t^M``."""
    n = len(rows)
    m = [[e.truncate(M) for e in r] for r in rows]
    live_rows = list(range(n))
    live_cols = list(range(n))
    total = Fraction(0)
    for _ in range(n):
        best = None
        for i in live_rows:
            for j in live_cols:
                e = m[i][j]
                if e.terms:
                    o = e.ord()
                    if best is None or o < best[0]:
                        best = (o, i, j)
                        if o == 0:
                            break
            if best is not None and best[0] == 0:
                break
        if best is None:
            raise PrecisionExhausted(M)
        v, pi, pj = best
        total += v
        live_rows.remove(pi)
        live_cols.remove(pj)
        piv = m[pi][pj]
        # factor_i = m[i][pj] / piv, needed modulo t^(M - v)
        unit = piv.shift(-v)
        inv = unit_inverse(unit, M - v)
        prow = m[pi]
        for i in live_rows:
            a = m[i][pj]
            if not a.terms:
                continue
            f = a.shift(-v).mul(inv, below=M - v)
            row = m[i]
            for j in live_cols:
                pe = prow[j]
                if pe.terms:
                    row[j] = (row[j] - f.mul(pe, below=M)).truncate(M)
            row[pj] = a.field.zero
    return total


def det_ord(rows: list, precision=None):
    """``ord`` of the determinant; ``INF`` when the determinant is zero."""
    n = len(rows)
    field = _zero_like([e for r in rows for e in r]).field
    if field.kind == "padic":
        value = _det_field([[e.value for e in r] for r in rows], Fraction(0))
        return field.scalar(value).ord()
    shift = Fraction(0)
    norm = []
    top = Fraction(0)
    for r in rows:
        ords = [e.ord() for e in r if e.terms]
        if not ords:
            return INF
        s = min(ords)
        shift += s
        rr = [e.shift(-s) for e in r]
        norm.append(rr)
        top += max((max(k for k in e.terms) / Fraction(e.ramification) for e in rr if e.terms))
    # a nonzero determinant has ord <= top, so precision beyond top is conclusive
    M = Fraction(precision) if precision is not None else Fraction(max(4, n))
    while True:
        try:
            return shift + _det_ord_truncated(norm, M)
        except PrecisionExhausted:
            if M > top:
                return INF
            M *= 2
