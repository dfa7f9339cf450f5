import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from latticetri.counting import AreaParam, FloatSlope, Slope, SurdSqrt, count_lattice_points
from latticetri.exactnum import parse_scalar
from latticetri.hull import (
    HullQuery,
    LatticePolygon,
    boundary_density,
    brute_force_counts,
    hull_under_line,
    pick_check,
    segment_decomposition,
    triangle_hull,
)

FIG5 = [(1, 1), (5, 5), (3, 9), (9, 5), (4, 1)]


def convex_hull_points(pts):
    """Monotone chain over a point set; used as an independent oracle."""
    pts = sorted(set(pts))
    if len(pts) < 3:
        return pts

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def test_hull_examples():
    h = hull_under_line(HullQuery(Slope(1, 2), 0, 4))
    assert (h.A, h.B, h.I) == (4, 8, 1)
    h = hull_under_line(HullQuery(Slope(1, 1), 0, 3))
    assert (h.A, h.B, h.I) == (Fraction(9, 2), 9, 1)
    h = hull_under_line(HullQuery(Slope(1, 1), 0, 1))
    assert (h.A, h.B, h.I) == (Fraction(1, 2), 3, 0)


def test_segment_examples():
    h = hull_under_line(HullQuery(Slope(1, 2), 0, 4))
    assert [(s, n) for s, n, _ in segment_decomposition(h) if s != 0] == [(Slope(1, 2), 2)]
    h = hull_under_line(HullQuery(Slope(1, 1), 0, 3))
    assert [(s, n) for s, n, _ in segment_decomposition(h) if s != 0] == [(Slope(1, 1), 3)]


def test_segments_increasing_for_sqrt2():
    h = hull_under_line(HullQuery(FloatSlope(parse_scalar("sqrt(2)")), 0, 50))
    vals = [Fraction(s.p, s.q) for s in h.segments]
    assert all(a < b for a, b in zip(vals, vals[1:]))
    assert h.pick_holds()
    assert sum(s.q * s.n for s in h.segments) == h.N


def test_pick_examples():
    r = pick_check(LatticePolygon(FIG5))
    assert (r.I, r.B, r.A) == (17, 12, 22) and r.identity_holds
    r = pick_check([(0, 0), (1, 0), (1, 1), (0, 1)])
    assert (r.A, r.B, r.I) == (1, 4, 0)
    r = pick_check([(0, 0), (3, 0), (0, 3)])
    assert (r.A, r.B, r.I) == (Fraction(9, 2), 9, 1)


def test_pick_rejects_bad_polygons():
    with pytest.raises(ValueError):
        pick_check([(0, 0), (2, 2), (2, 0), (0, 2)])  # bow tie
    with pytest.raises(ValueError):
        pick_check([(0, 0), (1, 1)])
    with pytest.raises(ValueError):
        pick_check([(0, 0), (1, 1), (2, 2)])


def test_boundary_density_examples():
    assert boundary_density(5, Slope(1, 1)) == pytest.approx(0.8)
    assert boundary_density(1, Slope(1, 1)) == 0
    # the hull of the sqrt(6), 3/2 triangle's points includes the axis points,
    # so its single positive point (1, 1) is interior
    h = triangle_hull("sqrt(6)", Slope(3, 2))
    assert h.I + h.D == 1


def _line_brute(beta, gamma, N):
    pts = [(x, y) for x in range(N + 1) for y in range(int(beta * x + gamma) + 1)]
    hull = convex_hull_points(pts)
    if len(hull) < 3:
        return hull, None
    return hull, pick_check(hull)


@settings(max_examples=150)
@given(st.integers(1, 8), st.integers(1, 8), st.fractions(min_value=0, max_value=Fraction(19, 20), max_denominator=20), st.integers(1, 25))
def test_hull_matches_brute_force(p, q, gamma, N):
    beta = Fraction(p, q)
    h = hull_under_line(HullQuery(Slope.of(beta), gamma, N))
    assert h.pick_holds()
    hull, rep = _line_brute(beta, gamma, N)
    if rep is None or rep.A == 0:
        assert h.degenerate
        return
    assert set(h.vertices) == set(hull)
    assert (h.A, h.B, h.I) == (rep.A, rep.B, rep.I)


@settings(max_examples=1000)
@given(st.fractions(min_value=1, max_value=30, max_denominator=40), st.integers(1, 9), st.integers(1, 9), st.sampled_from([1, 2, 3, 6]))
def test_interior_plus_positive_boundary_is_count(r, p, q, n):
    alpha = AreaParam(r, n)
    slope = Slope.of(Fraction(p, q))
    h = triangle_hull(alpha, slope)
    assert h.pick_holds()
    assert h.I + h.D == count_lattice_points(alpha, slope)


@given(st.fractions(min_value=1, max_value=40, max_denominator=20), st.sampled_from(["1+sqrt(2)", "sqrt(3)", "(1+sqrt(5))/2"]))
def test_hull_count_surd_slopes(r, s):
    h = triangle_hull(AreaParam(r), SurdSqrt(parse_scalar(s)))
    assert h.I + h.D == count_lattice_points(AreaParam(r), SurdSqrt(parse_scalar(s)))


def random_polygon(rng, size=40):
    """Star-shaped polygon around a centre, sorted by angle."""
    while True:
        k = rng.randint(3, 9)
        pts = {(rng.randint(0, size - 1), rng.randint(0, size - 1)) for _ in range(k)}
        if len(pts) < 3:
            continue
        cx = sum(p[0] for p in pts) / len(pts) + 1e-3
        cy = sum(p[1] for p in pts) / len(pts) + 1e-3
        vs = sorted(pts, key=lambda p: np.arctan2(p[1] - cy, p[0] - cx))
        try:
            r = pick_check(vs, brute_limit=0)
        except ValueError:
            continue
        return vs, r


def test_random_polygons_against_brute_force():
    rng = random.Random(5)
    for _ in range(1000):
        vs, rep = random_polygon(rng)
        bi, bb = brute_force_counts(vs)
        assert (rep.I, rep.B) == (bi, bb)


def test_positive_boundary_dichotomy():
    # rational slope: linear growth of positive boundary points
    for N in (100, 1000):
        h = hull_under_line(HullQuery(Slope(2, 3), 0, N))
        assert h.D >= N / 3 - 2
    # badly approximable slope: sparse positive boundary
    h = hull_under_line(HullQuery(FloatSlope(parse_scalar("sqrt(2)")), 0, 10**4))
    assert h.D / 10**4 <= 0.05
