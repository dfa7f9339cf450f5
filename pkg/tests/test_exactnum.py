from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from latticetri.exactnum import SurdValue, isqrt, parse_scalar, squarefree_split, surd_floor, surd_sign

squarefree = st.sampled_from([2, 3, 5, 6, 7, 10, 11, 13, 14, 15, 21, 30, 101, 9973])
ints = st.integers(-10**30, 10**30)


@st.composite
def surds(draw):
    return SurdValue(draw(ints), draw(ints), draw(st.integers(1, 10**20)), draw(squarefree))


def test_isqrt_examples():
    assert isqrt(0) == 0
    assert isqrt(150) == 12
    assert isqrt(144) == 12
    with pytest.raises(ValueError):
        isqrt(-1)


@given(st.integers(0, 2**2048))
def test_isqrt_bracket(x):
    r = isqrt(x)
    assert r * r <= x < (r + 1) ** 2


def test_surd_floor_examples():
    assert surd_floor(SurdValue(1, 0, 1, 2)) == 1
    assert surd_floor(SurdValue(5, 3, 4, 6)) == 3
    assert surd_floor(SurdValue(-1, 0, 1, 2)) == -2


def test_surd_sign_examples():
    assert surd_sign(1, 2, 0, 0, -1) == 1
    assert surd_sign(1, 2, 1, 3, -4) == -1
    assert surd_sign(2, 6, 0, 0, -5) == -1


def test_normalization():
    x = SurdValue(2, 4, 6, 8)  # (2*sqrt(8)+4)/6 = (2*sqrt(2)+2)/3
    assert (x.a, x.b, x.c, x.n) == (2, 2, 3, 2)
    y = SurdValue(3, 1, 1, 9)  # 3*3+1
    assert y.is_rational and y.as_fraction() == 10
    z = SurdValue(0, -4, -6, 0)
    assert (z.a, z.b, z.c) == (0, 2, 3)


@given(surds())
def test_normalization_idempotent(x):
    y = SurdValue(x.a, x.b, x.c, x.n)
    assert (y.a, y.b, y.c, y.n) == (x.a, x.b, x.c, x.n)


@settings(max_examples=1000)
@given(surds())
def test_floor_bracket(x):
    f = surd_floor(x)
    assert (x - f).sign() >= 0
    assert (x - (f + 1)).sign() < 0


@settings(max_examples=1000)
@given(st.integers(-10**12, 10**12), squarefree, st.integers(-10**12, 10**12), squarefree, st.integers(-10**13, 10**13))
def test_sign_matches_high_precision(a1, n1, a2, n2, b):
    with mpmath.workprec(256):
        v = a1 * mpmath.sqrt(n1) + a2 * mpmath.sqrt(n2) + b
        if abs(v) > mpmath.mpf(2) ** -60:
            assert surd_sign(a1, n1, a2, n2, b) == (1 if v > 0 else -1)


def test_sign_exact_zero():
    # sqrt(8) - 2 sqrt(2) = 0 reaches the pair routine unnormalized
    assert surd_sign(1, 8, -2, 2, 0) == 0
    assert surd_sign(0, 0, 0, 0, 0) == 0


@given(surds(), surds())
def test_field_operations(x, y):
    if x.n != y.n:
        y = SurdValue(y.a, y.b, y.c, x.n)
    with mpmath.workdps(80):
        fx, fy = x.to_mpf(80), y.to_mpf(80)
        assert abs((x + y).to_mpf(80) - (fx + fy)) <= 1e-40 * (1 + abs(fx) + abs(fy))
        assert abs((x * y).to_mpf(80) - fx * fy) <= 1e-40 * (1 + abs(fx * fy))
        if y.sign() != 0:
            assert abs((x / y).to_mpf(80) - fx / fy) <= 1e-30 * (1 + abs(fx / fy))


@given(surds(), surds())
def test_compare_is_antisymmetric(x, y):
    if x.n != y.n:
        y = SurdValue(y.a, y.b, y.c, x.n)
    assert x.compare(y) == -y.compare(x)
    assert (x.compare(y) == 0) == (x == y)


def test_squarefree_split():
    assert squarefree_split(72) == (6, 2)
    assert squarefree_split(1) == (1, 1)
    assert squarefree_split(30) == (1, 30)


@pytest.mark.parametrize(
    "text,value",
    [
        ("7", SurdValue.rational(7)),
        ("-3/4", SurdValue.rational(Fraction(-3, 4))),
        ("15541.957707", SurdValue.rational(Fraction(15541957707, 10**6))),
        ("2*sqrt(6)", SurdValue(2, 0, 1, 6)),
        ("3/2*sqrt(2)", SurdValue(3, 0, 2, 2)),
        ("(1+sqrt(2))/2", SurdValue(1, 1, 2, 2)),
        ("(3*sqrt(5)+7)/2", SurdValue(3, 7, 2, 5)),
        ("3+2*sqrt(2)", SurdValue(2, 3, 1, 2)),
        ("-sqrt(6)/3", SurdValue(-1, 0, 3, 6)),
    ],
)
def test_parse(text, value):
    assert parse_scalar(text) == value


@pytest.mark.parametrize("bad", ["", "sqrt(2)+1/2", "abc", "1/0", "sqrt(-2)", "2**3"])
def test_parse_rejects(bad):
    with pytest.raises((ValueError, ZeroDivisionError)):
        parse_scalar(bad)


@given(surds())
def test_text_round_trip(x):
    assert parse_scalar(x.to_text()) == x
