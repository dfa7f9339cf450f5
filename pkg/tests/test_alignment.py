import json
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from latticetri.alignment import (
    AlignmentQuery,
    align_multiples,
    align_radicals,
    bad_area_search,
    candidate_slopes,
    certify_fracs,
    comparison_density,
    evaluate_area,
    predicted_density,
)
from latticetri.cache import ResultCache
from latticetri.counting import AreaParam, Slope, count_lattice_points, deficit_exact
from latticetri.exactnum import SurdValue, parse_scalar, surd_floor


def test_align_multiples_exact_rationals():
    res = align_multiples([Fraction(1, 3), Fraction(1, 2)], 0)
    # m = 1 is already an exact common multiple: 3 * 1/3 = 2 * 1/2 = 1
    assert res.found and res.m == 1 and res.b == (3, 2)
    for a, b in zip([Fraction(1, 3), Fraction(1, 2)], res.b):
        assert a * b == res.m


def test_align_multiples_sqrt2_convergent():
    res = align_multiples(["sqrt(2)"], Fraction(1, 100))
    # 99/70 is the first continued-fraction convergent within 0.01; 239/169 is the next
    assert (res.m, res.b) == (99, (70,))
    assert abs(70 * math.sqrt(2) - 99) <= 0.01
    later = align_multiples(["sqrt(2)"], Fraction(1, 400))
    assert (later.m, later.b) == (239, (169,))


def test_align_multiples_float_bruteforce():
    vals = [math.sqrt(2), math.sqrt(3)]
    res = align_multiples(vals, 0.2, 100)
    assert res.found
    assert all(abs(a * b - res.m) <= 0.2 for a, b in zip(vals, res.b))
    for m in range(1, res.m):
        assert not all(abs(a * round(m / a) - m) <= 0.2 for a in vals)


def test_align_multiples_near_miss():
    res = align_multiples(["sqrt(2)"], Fraction(1, 10**6), k_max=50)
    assert not res.found and res.m is None
    m, b, err = res.near_miss
    assert err == pytest.approx(abs(b[0] * math.sqrt(2) - m))
    with pytest.raises(ValueError):
        align_multiples([0, 1], 0.1)


def test_align_radicals_examples():
    hits = align_radicals(AlignmentQuery((6,), 5, Fraction(1, 10), 3))
    assert [h.k for h in hits] == [2]
    assert hits[0].fracs[0] == pytest.approx(2 * math.sqrt(30) - 10)
    assert hits[0].alpha == AreaParam(2, 5)
    hits = align_radicals(AlignmentQuery((), 5, Fraction(1, 2), 1))
    assert [h.k for h in hits] == [1]


def test_align_radicals_warmup_set():
    q = AlignmentQuery((2, 3, 5, 10, 14), 6, Fraction(1, 10), 10**6)
    hits = align_radicals(q, limit=3)
    assert hits
    for h in hits:
        for n, f in zip(q.radicands, h.fracs):
            x = SurdValue(h.k, 0, 1, 6 * n)
            fr = x - surd_floor(x)
            assert fr.compare(Fraction(9, 10)) > 0 and fr.compare(1) < 0


def test_query_validation():
    with pytest.raises(ValueError):
        AlignmentQuery((4,), 5, Fraction(1, 10), 10)
    with pytest.raises(ValueError):
        AlignmentQuery((2, 2), 5, Fraction(1, 10), 10)
    with pytest.raises(ValueError):
        AlignmentQuery((2,), 9, Fraction(1, 10), 10)
    with pytest.raises(ValueError):
        AlignmentQuery((2,), 2, Fraction(1, 10), 10)
    with pytest.raises(ValueError):
        AlignmentQuery((2,), 5, Fraction(3, 2), 10)


@settings(max_examples=100)
@given(st.integers(1, 10**5), st.sampled_from([2, 3, 5, 7, 11]), st.fractions(min_value=Fraction(1, 20), max_value=Fraction(19, 20)))
def test_certify_matches_definition(k, N, eps):
    got = certify_fracs(k, [(1, N)], eps)
    x = k * SurdValue.sqrt(N)
    fr = x - surd_floor(x)
    assert (got is not None) == (fr.compare(1 - eps) > 0)


def test_scan_finds_every_hit_in_range():
    q = AlignmentQuery((2, 3), 5, Fraction(1, 4), 3000)
    got = [h.k for h in align_radicals(q)]
    want = [k for k in range(1, 3001) if certify_fracs(k, q.targets(), q.epsilon) is not None]
    assert got == want


def test_workers_do_not_change_hits():
    q = AlignmentQuery((2, 3), 5, Fraction(1, 4), 20000)
    from latticetri.alignment import scan_aligned

    a = scan_aligned(q.targets(), q.epsilon, q.k_max, block=3000, workers=1)
    b = scan_aligned(q.targets(), q.epsilon, q.k_max, block=3000, workers=2)
    assert a == b


def test_cache_roundtrip_and_recertify(tmp_path):
    cache = ResultCache(tmp_path)
    q = AlignmentQuery((2, 3), 5, Fraction(1, 4), 3000)
    first = align_radicals(q, cache=cache)
    entries = cache.ls()
    assert len(entries) == 1
    assert align_radicals(q, cache=cache) == first
    # a tampered stored hit fails re-certification and the block is rescanned
    path = tmp_path / entries[0]["file"]
    path.write_text(json.dumps([1, 2, 3]) + "\n")
    assert align_radicals(q, cache=cache) == first
    assert json.loads(path.read_text()) == [h.k for h in first]
    # corrupt file is dropped by gc
    path.write_text("{not json")
    assert cache.gc() >= 1
    assert cache.ls() == []


def test_candidate_slopes():
    s = candidate_slopes(2)
    assert [str(x) for x in s] == ["1/2", "1/1", "3/2", "2/1", "5/2", "3/1"]


def test_evaluate_area_integer():
    rep = evaluate_area(10)
    assert rep.overall_exact == Fraction(-1, 2)
    assert rep.best_count == 45 and rep.best_beta == 1.0
    for n in (3, 7, 20):
        assert evaluate_area(n, 6).overall_exact == Fraction(-1, 2)


def test_evaluate_area_sqrt6():
    rep = evaluate_area("sqrt(6)", 5, local=False)
    assert rep.overall_exact == -2 * SurdValue.sqrt(6).reciprocal()
    assert rep.overall_exact == deficit_exact(AreaParam(1, 6), count_lattice_points(AreaParam(1, 6), Slope(3, 2)))


def test_evaluate_area_dominance():
    a = Fraction(2291, 97)
    scan = evaluate_area(a, 10)
    full = evaluate_area(a, 10, mode="exact-sweep")
    assert scan.overall_sup >= max(d for _, d in scan.candidate_sups)
    assert full.best_count >= scan.best_count
    assert full.overall_sup >= scan.overall_sup
    with pytest.raises(Exception):
        evaluate_area(10**4, 3, mode="exact-sweep", budget=10)
    with pytest.raises(ValueError):
        evaluate_area(10, 0)


@settings(max_examples=25)
@given(st.fractions(min_value=5, max_value=200, max_denominator=50))
def test_evaluate_area_monotone_in_qmax(a):
    sups = [evaluate_area(a, q, local=False).overall_sup for q in (1, 2, 4, 8)]
    assert sups == sorted(sups)
    assert evaluate_area(a, 6).overall_sup >= sups[2]


def test_bad_area_search_vacuous():
    out = bad_area_search(1.9, k_max=10**5)
    assert out.tried == 1 and len(out.results) == 1
    alpha, sup = out.results[0]
    assert sup <= -1 + 1.9 / 2
    # the hit is the first aligned k for the chosen anchor
    assert alpha.n == out.anchor
    with pytest.raises(ValueError):
        bad_area_search(2.5)


def test_bad_area_search_no_hit_reports_near_miss():
    out = bad_area_search(0.01, k_max=2000, max_tries=5)
    assert out.results == []
    assert out.tried <= 5


def test_predicted_density():
    assert predicted_density(1) == Fraction(1, 2)
    p = predicted_density(parse_scalar("(1+sqrt(2))/2"))
    assert float(p) == pytest.approx(0.48223, abs=1e-5)
    assert predicted_density("2+sqrt(2)") == 0


def test_density_small():
    d = comparison_density("(1+sqrt(2))/2", 200)
    assert 0 <= d.measured <= 1
    assert d.measure + d.complement == 200
    assert abs(d.measured - d.predicted) < 0.03
    with pytest.raises(ValueError):
        comparison_density(Fraction(3, 2), 10)
    with pytest.raises(ValueError):
        comparison_density("sqrt(4)", 10)


def test_density_zero_prediction():
    d = comparison_density("2+sqrt(2)", 300)
    assert d.predicted == 0
    assert d.measured < 0.02




def test_density_matches_sampling():
    # points (k, m) with m/s + k s < alpha are counted by N_beta
    s = parse_scalar("(1+sqrt(2))/2")
    T = 40
    d = comparison_density(s, T)
    sf = float(s)
    steps = 20000
    hits = 0
    for i in range(steps):
        a = (i + 0.5) * T / steps
        n = math.floor(a)
        nb = sum(max(0, math.ceil((a - k * sf) * sf) - 1) for k in range(1, int(a / sf) + 1))
        hits += n * (n - 1) // 2 < nb
    assert abs(d.measured - hits / steps) < 0.01
