"""Exact arithmetic in the coefficient field.

Two valued fields are provided:

* :class:`LaurentField` -- Puiseux polynomials ``sum c_e t^e`` with
  ``e`` in ``(1/N)Z`` over an exact residue field (``Q`` or ``F_p``).
  The uniformizer is ``t`` and ``ord`` is the smallest exponent.
* :class:`PadicField` -- rational numbers with the ``p``-adic valuation.
  Only integral exponents of the uniformizer ``p`` exist here.

Elements are immutable.  Nothing is ever rounded; ``ord(0)`` is the
distinguished value :data:`INF`.
"""
from __future__ import annotations

import re
from fractions import Fraction
from functools import total_ordering
from math import gcd
from typing import Iterator, Union

from .errors import ParseError

__all__ = [
    "INF",
    "Infinity",
    "Fp",
    "RationalResidueField",
    "PrimeResidueField",
    "QQ",
    "LaurentField",
    "PadicField",
    "PuiseuxScalar",
    "PadicScalar",
    "ScalarParseError",
    "as_fraction",
    "format_rational",
    "parse_rational",
]


@total_ordering
class Infinity:
    """The valuation of zero.  Compares above every rational."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "+oo"

    __str__ = __repr__

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("berkres-infinity")

    def __lt__(self, other):
        return False

    def __gt__(self, other):
        return other is not self

    def __add__(self, other):
        return self

    __radd__ = __add__

    def __mul__(self, other):
        if other == 0:
            raise ValueError("0 * infinity is undefined")
        if other < 0:
            raise ValueError("negative multiples of infinity are not valuations")
        return self

    __rmul__ = __mul__


INF = Infinity()


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return parse_rational(x)
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


def parse_rational(text: str) -> Fraction:
    text = text.strip()
    if not re.fullmatch(r"[+-]?\d+(/\d+)?", text):
        raise ValueError(f"not an exact rational: {text!r}")
    return Fraction(text)


def format_rational(x) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


# ---------------------------------------------------------------------------
# residue fields


class Fp:
    """An element of the prime field F_p."""

    __slots__ = ("v", "p")

    def __init__(self, v: int, p: int):
        self.v = v % p
        self.p = p

    def _other(self, other):
        if isinstance(other, Fp):
            if other.p != self.p:
                raise ValueError("mixing different prime fields")
            return other.v
        if isinstance(other, int):
            return other % self.p
        if isinstance(other, Fraction):
            if other.denominator % self.p == 0:
                raise ZeroDivisionError(f"{other} has no reduction mod {self.p}")
            return other.numerator * pow(other.denominator, -1, self.p) % self.p
        return NotImplemented

    def __add__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return Fp(self.v + o, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return Fp(self.v - o, self.p)

    def __rsub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return Fp(o - self.v, self.p)

    def __mul__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return Fp(self.v * o, self.p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        if o == 0:
            raise ZeroDivisionError("division by zero in F_p")
        return Fp(self.v * pow(o, -1, self.p), self.p)

    def __rtruediv__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        if self.v == 0:
            raise ZeroDivisionError("division by zero in F_p")
        return Fp(o * pow(self.v, -1, self.p), self.p)

    def __neg__(self):
        return Fp(-self.v, self.p)

    def __pow__(self, n: int):
        if n < 0:
            return Fp(pow(self.v, -1, self.p), self.p) ** (-n)
        return Fp(pow(self.v, n, self.p), self.p)

    def __eq__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return False
        return self.v == o

    def __hash__(self):
        return hash((self.v, self.p))

    def __bool__(self):
        return self.v != 0

    def __repr__(self):
        return f"{self.v} (mod {self.p})"

    def __str__(self):
        return str(self.v)


class RationalResidueField:
    """The residue field Q (residue characteristic 0)."""

    characteristic = 0
    name = "Q"

    def __call__(self, x) -> Fraction:
        if isinstance(x, Fp):
            raise TypeError("cannot lift an F_p element to Q")
        return as_fraction(x)

    @property
    def zero(self):
        return Fraction(0)

    @property
    def one(self):
        return Fraction(1)

    def format(self, c) -> str:
        return format_rational(c)

    def to_json(self) -> dict:
        return {"residue": "Q"}

    def enumerate(self) -> Iterator[Fraction]:
        """Nonnegative integers 0, 1, 2, ... as residue elements."""
        n = 0
        while True:
            yield Fraction(n)
            n += 1

    def __eq__(self, other):
        return isinstance(other, RationalResidueField)

    def __hash__(self):
        return hash("Q")

    def __repr__(self):
        return "QQ"


class PrimeResidueField:
    """The residue field F_p, p >= 5."""

    name = "Fp"

    def __init__(self, p: int):
        if p < 5 or any(p % q == 0 for q in range(2, int(p**0.5) + 1)):
            raise ValueError(f"F_p residue fields need a prime p >= 5, got {p}")
        self.p = p
        self.characteristic = p

    def __call__(self, x) -> Fp:
        if isinstance(x, Fp):
            if x.p != self.p:
                raise ValueError("mixing different prime fields")
            return x
        if isinstance(x, str):
            x = parse_rational(x)
        z = Fp(0, self.p)._other(x)
        if z is NotImplemented:
            raise TypeError(f"cannot interpret {x!r} in F_{self.p}")
        return Fp(z, self.p)

    @property
    def zero(self):
        return Fp(0, self.p)

    @property
    def one(self):
        return Fp(1, self.p)

    def format(self, c) -> str:
        return str(c.v)

    def to_json(self) -> dict:
        return {"residue": "Fp", "p": self.p}

    def enumerate(self) -> Iterator[Fp]:
        for n in range(self.p):
            yield Fp(n, self.p)

    def __eq__(self, other):
        return isinstance(other, PrimeResidueField) and other.p == self.p

    def __hash__(self):
        return hash(("Fp", self.p))

    def __repr__(self):
        return f"GF({self.p})"


QQ = RationalResidueField()


# ---------------------------------------------------------------------------
# text grammar


class ScalarParseError(ParseError):
    """Raised for malformed scalar text; ``position`` is a 0-based offset."""

    def __init__(self, message: str, text: str, position: int):
        super().__init__(f"{message} at position {position} in {text!r}")
        self.text = text
        self.position = position


_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<op>[-+*/^()])|(?P<t>t))")


def _tokenize(text: str):
    pos = 0
    out = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            ws = len(text[pos:]) - len(text[pos:].lstrip())
            raise ScalarParseError(f"unexpected character {text[pos + ws]!r}", text, pos + ws)
        kind = m.lastgroup
        start = m.start(kind)
        out.append((kind, m.group(kind), start))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


def _parse_terms(text: str) -> list[tuple[Fraction, Fraction]]:
    """Parse into ``(coefficient, exponent)`` pairs (not yet combined)."""
    toks = _tokenize(text)
    i = 0

    def peek():
        return toks[i]

    def take(kind=None, value=None):
        nonlocal i
        tok = toks[i]
        if kind is not None and tok[0] != kind or value is not None and tok[1] != value:
            want = value or kind
            raise ScalarParseError(f"expected {want!r}, found {tok[1] or 'end of input'!r}", text, tok[2])
        i += 1
        return tok

    def rational():
        num = Fraction(int(take("num")[1]))
        if peek()[1] == "/" and toks[i + 1][0] == "num":
            take("op", "/")
            den_tok = take("num")
            if int(den_tok[1]) == 0:
                raise ScalarParseError("zero denominator", text, den_tok[2])
            num /= int(den_tok[1])
        return num

    def exponent():
        tok = peek()
        if tok[1] == "(":
            take("op", "(")
            sign = 1
            if peek()[1] in "+-" and peek()[0] == "op":
                sign = -1 if take()[1] == "-" else 1
            e = sign * rational()
            take("op", ")")
            return e
        sign = 1
        if tok[0] == "op" and tok[1] in "+-":
            sign = -1 if take()[1] == "-" else 1
        if peek()[0] != "num":
            raise ScalarParseError("exponent must be an integer or (p/q)", text, peek()[2])
        e = Fraction(int(take("num")[1]))
        if peek()[1] == "/":
            raise ScalarParseError("rational exponents must be parenthesised", text, peek()[2])
        return sign * e

    def power_of_t():
        take("t")
        if peek()[1] == "^":
            take("op", "^")
            return exponent()
        return Fraction(1)

    terms = []
    sign = 1
    first = True
    while True:
        tok = peek()
        if tok[0] == "op" and tok[1] in "+-":
            sign = -1 if tok[1] == "-" else 1
            take()
        elif not first:
            raise ScalarParseError(f"expected '+' or '-', found {tok[1] or 'end of input'!r}", text, tok[2])
        tok = peek()
        if tok[0] == "num":
            c = rational()
            e = Fraction(0)
            if peek()[1] == "*":
                take("op", "*")
                e = power_of_t()
        elif tok[0] == "t":
            c = Fraction(1)
            e = power_of_t()
        else:
            raise ScalarParseError(f"expected a term, found {tok[1] or 'end of input'!r}", text, tok[2])
        terms.append((sign * c, e))
        first = False
        if peek()[0] == "end":
            return terms


# ---------------------------------------------------------------------------
# Laurent / Puiseux polynomials


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


class PuiseuxScalar:
    """A finite sum ``sum_k c_k t^(k/N)`` with nonzero ``c_k`` in the residue field.

    ``terms`` maps the integer numerator ``k`` to its coefficient; the
    ramification ``N`` is kept minimal so equal elements compare equal.
    """

    __slots__ = ("field", "terms", "ramification")

    def __init__(self, field: "LaurentField", terms: dict, ramification: int = 1):
        if terms:
            g = ramification
            for k in terms:
                g = gcd(g, k)
                if g == 1:
                    break
            if g > 1:
                terms = {k // g: c for k, c in terms.items()}
                ramification //= g
        else:
            ramification = 1
        self.field = field
        self.terms = terms
        self.ramification = ramification

    # -- construction helpers ------------------------------------------------
    def _new(self, terms, n):
        return PuiseuxScalar(self.field, terms, n)

    def _coerce(self, other) -> "PuiseuxScalar":
        if isinstance(other, PuiseuxScalar):
            return other
        return self.field.scalar(other)

    def lift(self, n: int) -> dict:
        """Terms re-indexed for ramification ``n`` (a multiple of ours)."""
        s = n // self.ramification
        if s == 1:
            return self.terms
        return {k * s: c for k, c in self.terms.items()}

    # -- ring operations -----------------------------------------------------
    def __add__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        if not other.terms:
            return self
        if not self.terms:
            return other
        n = _lcm(self.ramification, other.ramification)
        out = dict(self.lift(n))
        for k, c in other.lift(n).items():
            v = out.get(k)
            if v is None:
                out[k] = c
            else:
                v = v + c
                if v:
                    out[k] = v
                else:
                    del out[k]
        return self._new(out, n)

    __radd__ = __add__

    def __neg__(self):
        return self._new({k: -c for k, c in self.terms.items()}, self.ramification)

    def __sub__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self.mul(other)

    __rmul__ = __mul__

    def mul(self, other: "PuiseuxScalar", below=None) -> "PuiseuxScalar":
        """Product, optionally dropping every exponent ``>= below``."""
        if not self.terms or not other.terms:
            return self.field.zero
        n = _lcm(self.ramification, other.ramification)
        a = self.lift(n)
        b = other.lift(n)
        if len(a) < len(b):
            a, b = b, a
        cut = None if below is None else below * n
        out: dict = {}
        get = out.get
        for kb, cb in b.items():
            for ka, ca in a.items():
                k = ka + kb
                if cut is not None and k >= cut:
                    continue
                v = get(k)
                out[k] = ca * cb if v is None else v + ca * cb
        return self._new({k: c for k, c in out.items() if c}, n)

    def __pow__(self, e: int):
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            if len(self.terms) != 1:
                raise ValueError("only monomials have inverses in the Puiseux polynomial ring")
            ((k, c),) = self.terms.items()
            return self._new({-k * (-e): (1 / self.field.residue(c)) ** (-e)}, self.ramification)
        result = self.field.one
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def shift(self, e) -> "PuiseuxScalar":
        """Multiply by ``t^e``."""
        e = as_fraction(e)
        if not self.terms or e == 0:
            return self
        n = _lcm(self.ramification, e.denominator)
        k0 = e.numerator * (n // e.denominator)
        return self._new({k + k0: c for k, c in self.lift(n).items()}, n)

    def truncate(self, below) -> "PuiseuxScalar":
        """Drop every term with exponent ``>= below``."""
        below = as_fraction(below)
        n = self.ramification
        return self._new({k: c for k, c in self.terms.items() if Fraction(k, n) < below}, n)

    def exact_div(self, other: "PuiseuxScalar") -> "PuiseuxScalar":
        """Exact quotient in the Laurent polynomial ring; raises if inexact."""
        other = self._coerce(other)
        if not other.terms:
            raise ZeroDivisionError("division by zero")
        if not self.terms:
            return self
        n = _lcm(self.ramification, other.ramification)
        rem = dict(self.lift(n))
        den = other.lift(n)
        dk = sorted(den)
        lo, hi = dk[0], dk[-1]
        inv_lead = 1 / self.field.residue(den[lo])
        top = max(rem) - hi
        quot = {}
        while rem:
            k = min(rem)
            qk = k - lo
            if qk > top:
                raise ArithmeticError("inexact division of Puiseux polynomials")
            qc = rem[k] * inv_lead
            quot[qk] = qc
            for j, c in den.items():
                kk = qk + j
                v = rem.get(kk)
                v = -qc * c if v is None else v - qc * c
                if v:
                    rem[kk] = v
                else:
                    rem.pop(kk, None)
        return self._new(quot, n)

    # -- valuation -----------------------------------------------------------
    def ord(self):
        if not self.terms:
            return INF
        return Fraction(min(self.terms), self.ramification)

    def reduce_at(self, v):
        """Coefficient of ``t^v`` (the reduction of ``t^-v x`` when ``ord x >= v``)."""
        v = as_fraction(v)
        n = self.ramification
        if (v * n).denominator != 1:
            return self.field.residue.zero
        return self.terms.get(int(v * n), self.field.residue.zero)

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and 0 in self.terms)

    def constant_value(self):
        return self.terms.get(0, self.field.residue.zero)

    def items(self):
        """``(exponent, coefficient)`` pairs in increasing exponent order."""
        n = self.ramification
        return [(Fraction(k, n), self.terms[k]) for k in sorted(self.terms)]

    # -- comparison / display ------------------------------------------------
    def __eq__(self, other):
        try:
            other = self._coerce(other)
        except (TypeError, ValueError):
            return False
        return self.ramification == other.ramification and self.terms == other.terms

    def __hash__(self):
        return hash((self.ramification, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def __str__(self):
        return self.field.format(self)

    def __repr__(self):
        return f"PuiseuxScalar({self.field.format(self)!r})"


class LaurentField:
    """The Puiseux field over ``residue``; ``ramification`` bounds parsed input."""

    kind = "laurent"

    def __init__(self, residue=QQ, ramification: int = 1):
        if ramification < 1:
            raise ValueError("ramification must be a positive integer")
        self.residue = residue
        self.ramification = ramification
        self.zero = PuiseuxScalar(self, {}, 1)
        self.one = PuiseuxScalar(self, {0: residue.one}, 1)

    def scalar(self, c) -> PuiseuxScalar:
        if isinstance(c, PuiseuxScalar):
            return c
        if isinstance(c, PadicScalar):
            raise TypeError("cannot mix p-adic and Laurent scalars")
        if isinstance(c, str):
            return self.parse(c)
        c = self.residue(c)
        return PuiseuxScalar(self, {0: c} if c else {}, 1)

    def monomial(self, c, e) -> PuiseuxScalar:
        e = as_fraction(e)
        c = self.residue(c)
        if not c:
            return self.zero
        return PuiseuxScalar(self, {e.numerator: c}, e.denominator)

    def uniformizer_power(self, e) -> PuiseuxScalar:
        return self.monomial(1, e)

    def parse(self, text: str) -> PuiseuxScalar:
        out = self.zero
        for c, e in _parse_terms(text):
            if (e * self.ramification).denominator != 1:
                raise ScalarParseError(
                    f"exponent {format_rational(e)} is not a multiple of 1/{self.ramification}", text, 0
                )
            out = out + self.monomial(c, e)
        return out

    def format(self, x: PuiseuxScalar) -> str:
        if not x.terms:
            return "0"
        parts = []
        for e, c in x.items():
            c_text = self.residue.format(c)
            neg = c_text.startswith("-")
            mag = c_text[1:] if neg else c_text
            if e == 0:
                body = mag
            else:
                if e == 1:
                    tp = "t"
                elif e.denominator == 1:
                    tp = f"t^{e.numerator}"
                else:
                    tp = f"t^({format_rational(e)})"
                body = tp if mag == "1" else f"{mag}*{tp}"
            if not parts:
                parts.append(("-" if neg else "") + body)
            else:
                parts.append((" - " if neg else " + ") + body)
        return "".join(parts)

    def to_json(self) -> dict:
        out = {"kind": "laurent", "ramification": self.ramification}
        out.update(self.residue.to_json())
        return out

    def __eq__(self, other):
        return isinstance(other, LaurentField) and other.residue == self.residue

    def __hash__(self):
        return hash(("laurent", self.residue))

    def __repr__(self):
        return f"LaurentField({self.residue!r})"


# ---------------------------------------------------------------------------
# p-adic rationals


def _vp(n: int, p: int) -> int:
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


class PadicScalar:
    """A rational number valued p-adically."""

    __slots__ = ("field", "value")

    def __init__(self, field: "PadicField", value: Fraction):
        self.field = field
        self.value = value

    def _coerce(self, other) -> "PadicScalar":
        if isinstance(other, PadicScalar):
            return other
        return self.field.scalar(other)

    def _new(self, v):
        return PadicScalar(self.field, v)

    def __add__(self, other):
        try:
            return self._new(self.value + self._coerce(other).value)
        except TypeError:
            return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        try:
            return self._new(self.value - self._coerce(other).value)
        except TypeError:
            return NotImplemented

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        return self._new(-self.value)

    def __mul__(self, other):
        try:
            return self._new(self.value * self._coerce(other).value)
        except TypeError:
            return NotImplemented

    __rmul__ = __mul__

    def mul(self, other, below=None):
        out = self * other
        return out if below is None else out.truncate(below)

    def __pow__(self, e: int):
        if not isinstance(e, int):
            return NotImplemented
        return self._new(self.value**e)

    def exact_div(self, other):
        other = self._coerce(other)
        return self._new(self.value / other.value)

    def shift(self, e):
        e = as_fraction(e)
        if e.denominator != 1:
            raise ValueError("p-adic backend supports integral exponents only")
        return self._new(self.value * Fraction(self.field.p) ** int(e))

    def truncate(self, below):
        """Canonical representative of ``x mod p^below`` (requires ord >= 0)."""
        below = as_fraction(below)
        m = -(-below.numerator // below.denominator)
        if self.value == 0 or m <= 0:
            return self.field.zero if m <= 0 else self
        if self.ord() < 0:
            raise ValueError("truncation needs an integral element")
        mod = self.field.p**m
        v = self.value
        r = v.numerator * pow(v.denominator, -1, mod) % mod
        return self._new(Fraction(r))

    def ord(self):
        v = self.value
        if v == 0:
            return INF
        p = self.field.p
        return Fraction(_vp(v.numerator, p) - _vp(v.denominator, p))

    def reduce_at(self, v):
        v = as_fraction(v)
        res = self.field.residue
        if self.value == 0:
            return res.zero
        if v.denominator != 1:
            raise ValueError("p-adic backend supports integral exponents only")
        o = self.ord()
        if o > v:
            return res.zero
        if o < v:
            raise ValueError(f"{self} has valuation {o} < {v}; no reduction at that level")
        return res(self.value / Fraction(self.field.p) ** int(v))

    def is_zero(self):
        return self.value == 0

    def is_constant(self):
        return True

    def constant_value(self):
        return self.reduce_at(0)

    def __eq__(self, other):
        try:
            return self.value == self._coerce(other).value
        except (TypeError, ValueError):
            return False

    def __hash__(self):
        return hash(("padic", self.field.p, self.value))

    def __bool__(self):
        return self.value != 0

    def __str__(self):
        return format_rational(self.value)

    def __repr__(self):
        return f"PadicScalar({self})"


class PadicField:
    """Q with the p-adic valuation; the residue field is F_p."""

    kind = "padic"
    ramification = 1

    def __init__(self, p: int):
        self.residue = PrimeResidueField(p)
        self.p = p
        self.zero = PadicScalar(self, Fraction(0))
        self.one = PadicScalar(self, Fraction(1))

    def scalar(self, c) -> PadicScalar:
        if isinstance(c, PadicScalar):
            return c
        if isinstance(c, PuiseuxScalar):
            raise TypeError("cannot mix p-adic and Laurent scalars")
        if isinstance(c, str):
            return self.parse(c)
        if isinstance(c, Fp):
            raise TypeError("residue elements do not lift canonically; pass a rational")
        return PadicScalar(self, as_fraction(c))

    def monomial(self, c, e) -> PadicScalar:
        return self.scalar(c).shift(e)

    def uniformizer_power(self, e) -> PadicScalar:
        return self.one.shift(e)

    def parse(self, text: str) -> PadicScalar:
        out = Fraction(0)
        for c, e in _parse_terms(text):
            if e.denominator != 1:
                raise ScalarParseError("p-adic scalars take integral powers of t = p only", text, 0)
            out += c * Fraction(self.p) ** int(e)
        return PadicScalar(self, out)

    def format(self, x: PadicScalar) -> str:
        return format_rational(x.value)

    def to_json(self) -> dict:
        return {"kind": "padic", "residue": "Fp", "p": self.p, "ramification": 1}

    def __eq__(self, other):
        return isinstance(other, PadicField) and other.p == self.p

    def __hash__(self):
        return hash(("padic", self.p))

    def __repr__(self):
        return f"PadicField({self.p})"


Scalar = Union[PuiseuxScalar, PadicScalar]
