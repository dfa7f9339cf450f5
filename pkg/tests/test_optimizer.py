from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from latticetri.counting import AreaParam, Slope, count_lattice_points
from latticetri.exactnum import SurdValue, parse_scalar
from latticetri.optimizer import (
    BudgetExceeded,
    GoodSlopeQuery,
    argmax_bruteforce_oracle,
    argmax_slope,
    capture_interval,
    enumerate_intervals,
    good_slope_analysis,
    good_threshold,
    limit_set_scan,
    projected_intervals,
    simplest_rational,
    sweep_runs,
)

alphas = st.fractions(min_value=5, max_value=50, max_denominator=97)


def test_capture_examples():
    iv = capture_interval((1, 1), 3)
    assert iv.beta_lo == parse_scalar("(7-3*sqrt(5))/2")
    assert iv.beta_hi == parse_scalar("(7+3*sqrt(5))/2")
    iv = capture_interval((1, 1), 2)
    assert iv.degenerate and iv.beta_lo == 1 and iv.beta_hi == 1
    assert capture_interval((2, 3), 4) is None
    with pytest.raises(ValueError):
        capture_interval((0, 1), 3)


@given(st.integers(1, 20), st.integers(1, 20), st.fractions(min_value=1, max_value=30, max_denominator=30), st.sampled_from([1, 2, 3, 6]))
def test_capture_interval_endpoints_are_tight(k, m, r, n):
    alpha = AreaParam(r, n)
    iv = capture_interval((k, m), alpha)
    if iv is None:
        assert alpha.squared() < 4 * k * m
        return
    # with s = t sqrt(n) the point sits on the hypotenuse at both ends: m = r n t - k n t^2
    for t in (iv.t_lo, iv.t_hi):
        assert t * (r * n) - t * t * (k * n) == m


def test_enumerate_examples():
    pts = sorted(iv.point for iv in enumerate_intervals(3, (Fraction(1, 2), 2)))
    assert pts == [(1, 1), (1, 2), (2, 1)]
    assert [iv.point for iv in enumerate_intervals(Fraction(5, 2), (Fraction(1, 2), 2))] == [(1, 1)]
    assert list(enumerate_intervals(1)) == []
    assert projected_intervals(3) == 3


def test_enumerate_order_and_nesting():
    last = {}
    for iv in enumerate_intervals(Fraction(37, 3)):
        k, m = iv.point
        if k in last:
            prev = last[k]
            assert prev.point[1] == m - 1
            assert prev.t_lo.compare(iv.t_lo) <= 0 and iv.t_hi.compare(prev.t_hi) <= 0
        last[k] = iv


def test_argmax_examples():
    rep = argmax_slope(5)
    assert rep.max_count == 10
    assert rep.maximizing_sets == [(SurdValue.rational(1), SurdValue.rational(1))]
    assert rep.canonical_slopes == [Slope(1, 1)]
    rep = argmax_slope(3)
    assert rep.max_count == 3 and rep.maximizing_sets == [(1, 1)]
    rep = argmax_slope(Fraction(5, 2))
    assert rep.max_count == 1
    assert rep.maximizing_sets == [(Fraction(1, 4), 4)]
    assert rep.canonical_slopes == [Slope(1, 1)]
    with pytest.raises(ValueError):
        argmax_slope(3, (2, 1))


def test_degenerate_capture_is_counted():
    rep = argmax_slope(2)
    assert rep.max_count == 1
    assert rep.maximizing_sets == [(1, 1)]


def test_oracle_examples():
    assert argmax_bruteforce_oracle(5, 1000).max_count == 10
    assert argmax_bruteforce_oracle(3, 1000).max_count == 3
    assert argmax_bruteforce_oracle(1, 10).max_count == 0


@settings(max_examples=40)
@given(alphas)
def test_sweep_matches_oracle_and_engines_agree(a):
    stream = sweep_runs(a, engine="stream")
    window = sweep_runs(a, engine="window")
    assert stream[:2] == window[:2]
    assert stream[0] == argmax_bruteforce_oracle(a, 2000).max_count


@settings(max_examples=40)
@given(alphas)
def test_canonical_slopes_attain_max(a):
    rep = argmax_slope(a)
    for (lo, hi), s in zip(rep.maximizing_sets, rep.canonical_slopes):
        assert s is not None
        assert lo.compare(s.value) <= 0 <= hi.compare(s.value)
        assert count_lattice_points(a, s) == rep.max_count
    # maximizing sets are disjoint and ordered
    for (_, h1), (l2, _) in zip(rep.maximizing_sets, rep.maximizing_sets[1:]):
        assert h1.compare(l2) < 0


def test_surd_area_sweep():
    a = "2*sqrt(6)"
    rep = argmax_slope(a)
    assert rep.max_count == 8
    assert set(rep.canonical_slopes) == {Slope(2, 3), Slope(3, 2)}
    assert rep.max_count == argmax_bruteforce_oracle(a, 2000).max_count


def test_worker_independence():
    a = Fraction(211, 7)
    one = argmax_slope(a, workers=1, engine="window").to_json()
    two = argmax_slope(a, workers=2, engine="window").to_json()
    assert one == two
    assert sweep_runs(a, engine="stream", workers=3)[:2] == sweep_runs(a, engine="stream")[:2]


def test_level_runs_contain_max_runs():
    a = Fraction(97, 5)
    best, runs, _ = sweep_runs(a)
    b2, lvl_runs, _ = sweep_runs(a, level=best - 1)
    assert b2 == best
    for lo, hi in runs:
        assert any(l.compare(lo) <= 0 and hi.compare(h) <= 0 for l, h in lvl_runs)


def test_budget():
    with pytest.raises(BudgetExceeded):
        argmax_slope(100, engine="stream", budget=100)


def test_simplest_rational():
    assert simplest_rational(Fraction(1, 3), Fraction(1, 2)) == Fraction(1, 2)
    assert simplest_rational(Fraction(1, 2), 3) == 1
    assert simplest_rational(Fraction(5, 2), Fraction(7, 2)) == 3
    assert simplest_rational(parse_scalar("sqrt(2)"), parse_scalar("sqrt(3)")) == Fraction(3, 2)
    assert simplest_rational(parse_scalar("sqrt(2)"), parse_scalar("sqrt(2)")) is None
    assert simplest_rational(Fraction(2, 7), Fraction(2, 7)) == Fraction(2, 7)


@given(st.fractions(min_value=Fraction(1, 10), max_value=10, max_denominator=60), st.fractions(min_value=0, max_value=1, max_denominator=60))
def test_simplest_rational_is_minimal(lo, w):
    hi = lo + w
    x = simplest_rational(lo, hi)
    assert lo <= x <= hi
    for q in range(1, x.denominator):
        # no smaller denominator fits
        assert not any(lo <= Fraction(p, q) <= hi for p in range(int(lo * q), int(hi * q) + 2))


def test_limit_scan_integers():
    scan = limit_set_scan(list(range(2, 21)))
    assert scan.frequency == {Slope(1, 1): 19}
    assert scan.in_lambda[Slope(1, 1)]
    scan = limit_set_scan([Fraction(5, 2)])
    assert scan.reports[0].canonical_slopes == [Slope(1, 1)]


def test_limit_scan_sqrt6():
    scan = limit_set_scan([f"{k}*sqrt(6)" for k in range(1, 21)])
    assert scan.frequency[Slope(3, 2)] >= 1


def test_good_slope_analysis():
    out = good_slope_analysis(GoodSlopeQuery(20, 0.3, 0.1))
    assert out
    for row in out:
        assert row["nearest"].denominator <= 9
        assert row["scaled_distance"] <= 50
    assert good_slope_analysis(GoodSlopeQuery(10, 1.9, 0.1)) == []
    with pytest.raises(ValueError):
        GoodSlopeQuery(10, 0.1, 0.2)


def test_three_halves_is_good_at_2sqrt6():
    alpha = AreaParam(2, 6)
    # threshold count is the smallest N > alpha^2/2 - alpha + 0.18 alpha
    assert good_threshold(alpha, Fraction(36, 100)) == 8
    out = good_slope_analysis(GoodSlopeQuery(alpha, 0.36, 0.1))
    assert any(r["beta_lo"].compare(Fraction(3, 2)) <= 0 <= r["beta_hi"].compare(Fraction(3, 2)) for r in out)
