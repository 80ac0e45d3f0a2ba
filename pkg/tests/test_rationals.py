from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pottsforge.rationals import (
    Rat,
    bernoulli_threshold,
    exp_bounds,
    ln_bounds,
    mpf_to_rat,
    rat_ceil,
    rat_decimal,
    rat_floor,
    rat_str,
    sqrt_bounds,
    sqrt_rat_exact,
    to_rat,
)


def test_to_rat_forms():
    assert to_rat(3) == 3
    assert to_rat("7/2") == Rat(7, 2)
    assert to_rat("0.25") == Rat(1, 4)
    assert to_rat(Fraction(-2, 6)) == Rat(-1, 3)
    with pytest.raises(TypeError):
        to_rat(0.5)
    with pytest.raises((TypeError, ValueError)):
        to_rat("nonsense")


def test_floor_ceil():
    assert rat_floor(to_rat("7/2")) == 3
    assert rat_floor(to_rat("-7/2")) == -4
    assert rat_ceil(to_rat("7/2")) == 4
    assert rat_ceil(to_rat("-7/2")) == -3
    assert rat_ceil(to_rat(5)) == 5


def test_str_and_decimal():
    assert rat_str(to_rat("6/3")) == "2"
    assert rat_str(to_rat("-7/2")) == "-7/2"
    assert rat_decimal(to_rat("1/4")).startswith("0.25")


@given(st.integers(min_value=-10**6, max_value=10**6).filter(lambda x: x != 0),
       st.integers(min_value=1, max_value=10**6))
def test_inverse_product(a, b):
    x = to_rat(a) / b
    assert x * (1 / x) == 1


def test_bernoulli_threshold_edges():
    fl, frac = bernoulli_threshold(to_rat(0))
    assert fl == 0 and frac == 0
    # p = 1 fits a uint64 threshold; the unit tail accepts the boundary draw
    fl, frac = bernoulli_threshold(to_rat(1))
    assert fl == (1 << 64) - 1 and frac == 1
    fl, frac = bernoulli_threshold(to_rat("1/2"))
    assert fl == 1 << 63 and frac == 0
    fl, frac = bernoulli_threshold(to_rat("1/3"))
    assert frac != 0
    with pytest.raises(ValueError):
        bernoulli_threshold(to_rat(2))


def test_directed_bounds_order():
    lo, hi = ln_bounds(to_rat(2))
    assert lo < hi
    # ln 2 = 0.693147...
    assert to_rat("693/1000") < lo < hi < to_rat("694/1000")
    lo, hi = exp_bounds(to_rat(1))
    assert to_rat("2718/1000") < lo < hi < to_rat("2719/1000")
    lo, hi = sqrt_bounds(to_rat(2))
    assert lo * lo < 2 < hi * hi


def test_sqrt_exact():
    assert sqrt_rat_exact(to_rat("9/4")) == to_rat("3/2")
    assert sqrt_rat_exact(to_rat(2)) is None


def test_mpf_to_rat_roundtrip():
    import mpmath

    with mpmath.workprec(80):
        x = mpmath.mpf("3.515625")  # exactly representable
    assert mpf_to_rat(x) == to_rat("3515625/1000000")
    assert mpf_to_rat(mpmath.mpf(-2)) == -2
