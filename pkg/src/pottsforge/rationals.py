"""Exact rational arithmetic helpers shared by every module.

All model parameters (q, gamma, rho, edge probabilities) are carried as
gmpy2.mpq values.  Irrational constants enter only through explicit
high-precision bounds produced here, always rounded in a stated direction
so that downstream comparisons stay conservative.
"""

from __future__ import annotations

from fractions import Fraction

import gmpy2
import mpmath
from gmpy2 import mpq, mpz

Rat = mpq

ZERO = mpq(0)
ONE = mpq(1)

_U64 = 1 << 64


def to_rat(x) -> Rat:
    """Coerce ints, Fractions, mpq, and strings like '7/2' or '0.25'."""
    if isinstance(x, type(ONE)):
        return x
    if isinstance(x, (int, mpz)):
        return mpq(x)
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    if isinstance(x, str):
        f = Fraction(x.strip())
        return mpq(f.numerator, f.denominator)
    if isinstance(x, float):
        raise TypeError(
            "refusing to coerce float %r; pass a Fraction or 'p/q' string" % x
        )
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


def rat_floor(x: Rat) -> int:
    return int(x.numerator // x.denominator)


def rat_ceil(x: Rat) -> int:
    return -rat_floor(-x)


def rat_str(x: Rat) -> str:
    """Canonical p/q rendering (plain integer when q == 1)."""
    x = to_rat(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def rat_decimal(x: Rat, digits: int = 12) -> str:
    """Decimal rendering for display; the exact value is always printed too."""
    x = to_rat(x)
    with mpmath.workprec(max(64, 4 * digits)):
        return mpmath.nstr(
            mpmath.mpf(x.numerator) / mpmath.mpf(x.denominator), digits
        )


def bernoulli_threshold(p: Rat) -> tuple[int, Rat]:
    """Split p into (floor(p * 2^64), fractional remainder).

    A uniform draw r on [0, 2^64) decides Bernoulli(p) exactly: r below the
    floor accepts, r above rejects, r equal recurses on the remainder.
    p = 1 is encoded as (2^64 - 1, 1) so the threshold fits in a uint64;
    the unit remainder makes the boundary draw accept with certainty.
    """
    p = to_rat(p)
    if p < 0 or p > 1:
        raise ValueError(f"probability {p} outside [0,1]")
    if p == 1:
        return _U64 - 1, ONE
    scaled = p * _U64
    fl = rat_floor(scaled)
    return fl, scaled - fl


def refine_bernoulli(frac: Rat, next_u64) -> bool:
    """Resolve the boundary case of an exact Bernoulli draw.

    `next_u64` supplies further 64-bit blocks of the same uniform variate.
    Terminates with probability 1; each round continues with chance 2^-64.
    """
    while True:
        if frac == 0:
            return False
        scaled = frac * _U64
        fl = rat_floor(scaled)
        r = next_u64()
        if r < fl:
            return True
        if r > fl:
            return False
        frac = scaled - fl


# -- directed bounds on irrational quantities --------------------------------

def rat_from_mpf_tuple(t) -> Rat:
    """Exact rational value of a raw libmp float tuple (sign, man, exp, bc)."""
    sign, man, exp, _bc = t
    man = int(man)
    if man == 0 and exp != 0:
        raise ValueError(f"non-finite float value {t}")
    if sign:
        man = -man
    if exp >= 0:
        return mpq(man * (1 << exp))
    return mpq(man, 1 << (-exp))


def mpf_to_rat(x) -> Rat:
    """Exact rational value of a (finite) mpf."""
    return rat_from_mpf_tuple(mpmath.mpf(x)._mpf_)


_mpf_to_rat = mpf_to_rat


def _directed(fn, prec_bits: int, lower: bool) -> Rat:
    """Rational bound on fn() with ~prec_bits of accuracy, rounded outward.

    Evaluates at prec_bits + 32 guard bits and pads by 2 ulps in the
    requested direction, so the returned rational is a true lower (upper)
    bound whenever mpmath's result is faithful to within a few ulps.
    """
    with mpmath.workprec(prec_bits + 32):
        v = fn()
        pad = mpmath.ldexp(abs(v) + 1, -(prec_bits + 24))
        v = v - pad if lower else v + pad
        return _mpf_to_rat(v)


def ln_bounds(x: Rat, prec_bits: int = 128) -> tuple[Rat, Rat]:
    x = to_rat(x)
    if x <= 0:
        raise ValueError("ln of non-positive value")

    def f():
        return mpmath.log(mpmath.mpf(x.numerator)) - mpmath.log(mpmath.mpf(x.denominator))

    return _directed(f, prec_bits, True), _directed(f, prec_bits, False)


def exp_bounds(x: Rat, prec_bits: int = 128) -> tuple[Rat, Rat]:
    x = to_rat(x)

    def f():
        return mpmath.exp(mpmath.mpf(x.numerator) / mpmath.mpf(x.denominator))

    return _directed(f, prec_bits, True), _directed(f, prec_bits, False)


def sqrt_rat_exact(x: Rat):
    """Exact rational square root, or None when x is not a perfect square."""
    x = to_rat(x)
    if x < 0:
        raise ValueError("negative value")
    num, den = mpz(x.numerator), mpz(x.denominator)
    if gmpy2.is_square(num) and gmpy2.is_square(den):
        return mpq(gmpy2.isqrt(num), gmpy2.isqrt(den))
    return None


def sqrt_bounds(x: Rat, prec_bits: int = 128) -> tuple[Rat, Rat]:
    x = to_rat(x)

    def f():
        return mpmath.sqrt(mpmath.mpf(x.numerator) / mpmath.mpf(x.denominator))

    return _directed(f, prec_bits, True), _directed(f, prec_bits, False)
