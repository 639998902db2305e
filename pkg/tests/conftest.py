import functools
import random
from fractions import Fraction
from pathlib import Path

import pytest

from berkres.maps import HomogeneousPair, resultant_ord
from berkres.valued import INF, LaurentField, PrimeResidueField

MAPS = Path(__file__).resolve().parent.parent / "maps"
K = LaurentField()
K5 = LaurentField(PrimeResidueField(5))


def pair(num, den, field=K) -> HomogeneousPair:
    return HomogeneousPair.from_strings(field, num, den)


PHI1 = pair(["1", "0", "-1", "0"], ["0", "0", "0", "t"])
PHI2 = pair(["t", "0", "0"], ["1", "0", "t"])
SQUARE = pair(["1", "0", "0"], ["0", "0", "1"])
HAAR5 = pair(["1", "0", "0", "0", "-1", "0"], ["0", "0", "0", "0", "0", "t"], K5)


def random_pair(rng: random.Random, d: int, with_t: bool = True, field=K) -> HomogeneousPair:
    """A morphism with small integer coefficients ``c0 + c1 t`` (or constants)."""
    while True:
        def coeff():
            c0 = rng.randint(-3, 3)
            c1 = rng.randint(-2, 2) if with_t else 0
            return field.scalar(c0) + field.monomial(c1, 1) if c1 else field.scalar(c0)

        num = tuple(coeff() for _ in range(d + 1))
        den = tuple(coeff() for _ in range(d + 1))
        if all(c.is_zero() for c in num) or all(c.is_zero() for c in den):
            continue
        p = HomogeneousPair(num, den)
        if resultant_ord(p) is not INF:
            return p


@pytest.fixture
def rng():
    return random.Random(20240617)


def frac(s) -> Fraction:
    return Fraction(s)


@functools.lru_cache(maxsize=None)
def psi(m: int, P: int = 16):
    from berkres.lattes import LattesSpec, lattes_map

    return lattes_map(LattesSpec(m, P))
