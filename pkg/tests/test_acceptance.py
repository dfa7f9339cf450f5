"""Acceptance criteria, one test each.

Every test prints a single ``PASS``/``FAIL`` line with the measured value.
Run directly (``python3 tests/test_acceptance.py``) to get just those lines.
"""

import math
import random
import sys
import time
from fractions import Fraction

import pytest

from latticetri.alignment import AlignmentQuery, align_radicals, bad_area_search, comparison_density, evaluate_area
from latticetri.counting import AreaParam, Slope, SurdSqrt, count_lattice_points, deficit, deficit_curve
from latticetri.exactnum import parse_scalar
from latticetri.hull import pick_check
from latticetri.lambdaset import dimension_fit, lambda_enumerate
from latticetri.optimizer import argmax_bruteforce_oracle, argmax_slope, capture_interval, limit_set_scan, sweep_runs


def report(name: str, ok: bool, detail: str, elapsed: float, limit: float) -> bool:
    ok = ok and elapsed <= limit
    line = f"{'PASS' if ok else 'FAIL'} {name}: {detail} [{elapsed:.1f}s / {limit:.0f}s]"
    print(line, flush=True)
    return ok


def check_integer_areas():
    t0 = time.perf_counter()
    bad = []
    for n in range(2, 101):
        rep = argmax_slope(n)
        if rep.max_count != n * (n - 1) // 2 or rep.maximizing_sets != [(1, 1)]:
            bad.append(n)
    return report("1 integer areas: max n(n-1)/2 only at beta=1", not bad, f"failures={bad}", time.perf_counter() - t0, 60)


def check_rational_residual():
    t0 = time.perf_counter()
    lo_grid = [Fraction(k, 100) for k in range(1000, 25001)]
    hi_grid = [Fraction(k, 100) for k in range(25000, 50001)]
    ratios = {}
    for s in (Slope(1, 1), Slope(3, 2), Slope(2, 1), Slope(5, 3)):
        m_lo = max(abs(p.residual) for p in deficit_curve(s, lo_grid))
        m_hi = max(abs(p.residual) for p in deficit_curve(s, hi_grid))
        ratios[str(s)] = m_hi / m_lo
    ok = all(r <= 1.1 for r in ratios.values())
    detail = ", ".join(f"{k}: {v:.4f}" for k, v in ratios.items())
    return report("2 rational-slope residual stays O(1) (ratio <= 1.1)", ok, detail, time.perf_counter() - t0, 300)


def check_irrational_limit():
    t0 = time.perf_counter()
    pt = deficit(10**4, SurdSqrt(parse_scalar("1+sqrt(2)")))
    err = abs(pt.deficit + math.sqrt(2))
    return report("3 beta=3+2sqrt2 deficit at 1e4 near -sqrt2", err <= 0.01, f"deficit={pt.deficit:.6f} err={err:.2e}", time.perf_counter() - t0, 30)


def check_lambda_structure():
    t0 = time.perf_counter()
    els = lambda_enumerate(100)
    a = all(abs(e.slope.q - e.slope.p) <= 2 * math.sqrt(e.slope.q) + 1 for e in els)
    b = all(Fraction(1, 3) <= e.slope.value <= 3 for e in els)
    c = Slope(9, 4) not in {e.slope for e in els}
    fit = dimension_fit([Fraction(1, 10**k) for k in (2, 3, 4, 5)])
    d = fit.exponent <= 0.80
    detail = f"n={len(els)} window={a} range={b} no 9/4={c} exponent={fit.exponent:.4f} counts={list(fit.counts)}"
    return report("4 slope set structure and box-count exponent <= 0.80", a and b and c and d, detail, time.perf_counter() - t0, 120)


def _interior_boundary(vs):
    """Independent oracle: exact crossing-number test at every point of the box."""
    n = len(vs)
    xs = [v[0] for v in vs]
    ys = [v[1] for v in vs]
    inner = bnd = 0
    for x in range(min(xs), max(xs) + 1):
        for y in range(min(ys), max(ys) + 1):
            on = False
            inside = False
            for i in range(n):
                (x1, y1), (x2, y2) = vs[i], vs[(i + 1) % n]
                cr = (x2 - x1) * (y - y1) - (y2 - y1) * (x - x1)
                if cr == 0 and min(x1, x2) <= x <= max(x1, x2) and min(y1, y2) <= y <= max(y1, y2):
                    on = True
                    break
                if (y1 > y) != (y2 > y):
                    # crossing lies right of x: x < x1 + (x2 - x1)(y - y1)/(y2 - y1)
                    lhs = (x - x1) * (y2 - y1)
                    rhs = (x2 - x1) * (y - y1)
                    if (lhs < rhs) if y2 > y1 else (lhs > rhs):
                        inside = not inside
            if on:
                bnd += 1
            elif inside:
                inner += 1
    return inner, bnd


def _random_polygon(rng, size=40):
    while True:
        k = rng.randint(3, 9)
        pts = {(rng.randint(0, size - 1), rng.randint(0, size - 1)) for _ in range(k)}
        if len(pts) < 3:
            continue
        cx = sum(p[0] for p in pts) / len(pts) + 1e-3
        cy = sum(p[1] for p in pts) / len(pts) + 1e-3
        vs = sorted(pts, key=lambda p: math.atan2(p[1] - cy, p[0] - cx))
        try:
            return vs, pick_check(vs, brute_limit=0)
        except ValueError:
            continue


def check_pick():
    t0 = time.perf_counter()
    fig = pick_check([(1, 1), (5, 5), (3, 9), (9, 5), (4, 1)])
    ok_fig = (fig.I, fig.B, fig.A) == (17, 12, 22)
    rng = random.Random(2024)
    mism = 0
    for _ in range(1000):
        vs, rep = _random_polygon(rng)
        if (rep.I, rep.B) != _interior_boundary(vs):
            mism += 1
    detail = f"reference pentagon I={fig.I} B={fig.B} A={fig.A}; random mismatches={mism}/1000"
    return report("5 Pick counts", ok_fig and mism == 0, detail, time.perf_counter() - t0, 600)


def check_capture_anchor():
    t0 = time.perf_counter()
    iv = capture_interval((1, 1), 3)
    lo = parse_scalar("(7-3*sqrt(5))/2")
    hi = parse_scalar("(7+3*sqrt(5))/2")
    ok = (iv.beta_lo - lo).sign() == 0 and (iv.beta_hi - hi).sign() == 0
    return report("6 capture interval of (1,1) at alpha=3", ok, f"[{iv.beta_lo.to_text()}, {iv.beta_hi.to_text()}]", time.perf_counter() - t0, 10)


def check_sweep_oracle():
    t0 = time.perf_counter()
    rng = random.Random(7)
    bad = []
    for _ in range(100):
        den = rng.randint(1, 1000)
        a = Fraction(rng.randint(5 * den, 50 * den), den)
        got = sweep_runs(a)[0]
        want = argmax_bruteforce_oracle(a, 10**4, endpoints=True).max_count
        if got != want:
            bad.append((a, got, want))
    return report("7 sweep max equals brute-force oracle on 100 areas", not bad, f"mismatches={bad}", time.perf_counter() - t0, 300)


def check_density():
    t0 = time.perf_counter()
    d = comparison_density(parse_scalar("(1+sqrt(2))/2"), 5000)
    err = abs(d.measured - d.predicted)
    return report("8 comparison density at T=5000", err <= 0.02, f"measured={d.measured:.5f} predicted={d.predicted:.5f} err={err:.5f}", time.perf_counter() - t0, 300)


def check_reference_area():
    t0 = time.perf_counter()
    rep = evaluate_area(Fraction("15541.957707"), 40)
    err = abs(rep.overall_sup + 0.98035)
    detail = f"overall_sup={rep.overall_sup:.5f} target=-0.98035 err={err:.5f} best_beta={rep.best_beta:.6f}"
    return report("9 reference area sup within 0.005", err <= 0.005, detail, time.perf_counter() - t0, 900)


def check_alignment_witness():
    t0 = time.perf_counter()
    q = AlignmentQuery((2, 3, 5, 10, 14), 6, Fraction(1, 10), 10**7)
    hits = align_radicals(q)
    out = bad_area_search(0.1, q_cand=3)
    found = out.results[0] if out.results else None
    ok = bool(hits) and found is not None and found[1] <= -0.95
    detail = f"aligned hits={len(hits)} first k={hits[0].k if hits else None}; bad area={found[0].text() if found else None} sup={found[1] if found else None}"
    return report("10 alignment hits and a bad area with sup <= -0.95", ok, detail, time.perf_counter() - t0, 600)


def check_three_halves_scan():
    t0 = time.perf_counter()
    alphas = [AreaParam(k, 6) for k in range(1, 201)]
    scan = limit_set_scan(alphas)
    ks = [k for k, (a, rep) in enumerate(zip(alphas, scan.reports), 1) if count_lattice_points(a, Slope(3, 2)) == rep.max_count]
    return report("11 slope 3/2 attains the max for some k*sqrt6, k<=200", bool(ks), f"{len(ks)} areas, first k={ks[:5]}", time.perf_counter() - t0, 300)


CHECKS = [
    check_integer_areas,
    check_rational_residual,
    check_irrational_limit,
    check_lambda_structure,
    check_pick,
    check_capture_anchor,
    check_sweep_oracle,
    check_density,
    check_reference_area,
    check_alignment_witness,
    check_three_halves_scan,
]


@pytest.mark.parametrize("check", CHECKS, ids=[c.__name__ for c in CHECKS])
def test_criterion(check, capsys):
    with capsys.disabled():
        ok = check()
    assert ok


if __name__ == "__main__":
    results = [c() for c in CHECKS]
    sys.exit(0 if all(results) else 1)
