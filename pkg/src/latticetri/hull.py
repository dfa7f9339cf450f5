"""Convex hull of the nonnegative lattice points under a line, with Pick accounting.

Hulls live in the configuration C_{beta,gamma}(N): the points (x, y) with
0 <= x <= N and 0 <= y <= beta*x + gamma.  A triangle of area alpha**2/2 is
mapped there by x = K - k with K = floor(alpha/sqrt(beta)), which turns the
column values alpha*sqrt(beta) - k*beta into beta*x + gamma with
gamma = alpha*sqrt(beta) - K*beta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Sequence

import mpmath
import numpy as np

from .counting import (
    DEFAULT_PREC,
    AreaParam,
    FloatSlope,
    Slope,
    SlopeSpec,
    SurdSqrt,
    as_slope_spec,
    column_heights,
    fixed_point_floors,
)
from .exactnum import SurdValue, as_surd

__all__ = [
    "Segment",
    "LatticePolygon",
    "HullSummary",
    "HullQuery",
    "PickReport",
    "hull_from_heights",
    "hull_under_line",
    "triangle_hull",
    "boundary_density",
    "segment_decomposition",
    "pick_check",
    "brute_force_counts",
]


class Segment(NamedTuple):
    """Maximal hull edge of slope p/q (p >= 0) containing n primitive steps."""

    p: int
    q: int
    n: int

    @property
    def slope(self) -> Fraction:
        return Fraction(self.p, self.q)

    @property
    def x_length(self) -> int:
        return self.q * self.n


@dataclass(frozen=True)
class LatticePolygon:
    vertices: tuple

    def __post_init__(self):
        vs = tuple((int(x), int(y)) for x, y in self.vertices)
        object.__setattr__(self, "vertices", vs)


@dataclass(frozen=True)
class HullSummary:
    A: Fraction
    B: int
    I: int
    D: int
    X: int
    Y: int
    segments: tuple
    vertices: tuple
    N: int
    heights_flagged: tuple = field(default=())

    @property
    def degenerate(self) -> bool:
        return self.A == 0

    def pick_holds(self) -> bool:
        return self.degenerate or self.A == self.I + Fraction(self.B, 2) - 1


@dataclass(frozen=True)
class HullQuery:
    beta: object
    gamma: object
    N: int

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("N must be >= 1")


def _cross(o, a, b) -> int:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _upper_chain(heights: Sequence[int]) -> list[tuple[int, int]]:
    """Upper hull of (x, heights[x]) from x = 0 to x = len - 1, collinear points dropped."""
    chain: list[tuple[int, int]] = []
    for x, h in enumerate(heights):
        pt = (x, int(h))
        while len(chain) >= 2 and _cross(chain[-2], chain[-1], pt) >= 0:
            chain.pop()
        chain.append(pt)
    return chain


def hull_from_heights(heights: Sequence[int], flagged=()) -> HullSummary:
    """Pick accounting of the hull of {(x, y): 0 <= x <= N, 0 <= y <= heights[x]}."""
    N = len(heights) - 1
    if N < 0:
        raise ValueError("need at least one column")
    if min(heights) < 0:
        raise ValueError("heights must be nonnegative")
    chain = _upper_chain(heights)
    h0, hN = chain[0][1], chain[-1][1]
    if N == 0 or (h0 == 0 and len(chain) == 2 and hN == 0):
        # a segment (or point); no area and no interior
        pts = N + 1 if N > 0 else h0 + 1
        return HullSummary(Fraction(0), pts, 0, 0, N + 1, hN + 1, (), tuple(chain), N, tuple(flagged))
    # vertices counterclockwise: (0,0) -> (N,0) -> (N,hN) -> chain reversed -> (0,h0)
    poly = [(0, 0), (N, 0)]
    if hN > 0:
        poly.append((N, hN))
    poly.extend(reversed(chain[:-1]))
    if poly[-1] == (0, 0):
        poly.pop()
    area2 = 0
    B = 0
    for i, (x1, y1) in enumerate(poly):
        x2, y2 = poly[(i + 1) % len(poly)]
        area2 += x1 * y2 - x2 * y1
        B += math.gcd(x2 - x1, y2 - y1)
    A = Fraction(area2, 2)
    I = A - Fraction(B, 2) + 1
    assert I.denominator == 1
    segs = []
    chain_pts = 0
    for (x1, y1), (x2, y2) in zip(chain, chain[1:]):
        g = math.gcd(x2 - x1, y2 - y1)
        segs.append(Segment((y2 - y1) // g, (x2 - x1) // g, g))
        chain_pts += g
    # positive boundary points: left side (0, 1..h0) plus chain points after
    # the start, minus the corner (N, hN) on the excluded x = N side
    D = h0 + chain_pts - 1
    segs.reverse()  # slopes increase walking from x = N toward x = 0
    return HullSummary(A, B, int(I), D, N + 1, hN + 1, tuple(segs), tuple(poly), N, tuple(flagged))


def _exact_line_floors(beta: SurdValue, gamma: SurdValue, N: int) -> list[int]:
    """floor(beta*x + gamma) for x = 0..N with beta, gamma sharing a radicand."""
    d = beta.n or gamma.n
    if beta.n and gamma.n and beta.n != gamma.n:
        raise ValueError("beta and gamma need a common radicand")
    den = beta.c * gamma.c
    a1, a0 = beta.a * gamma.c, gamma.a * beta.c
    b1, b0 = beta.b * gamma.c, gamma.b * beta.c
    if a1 == 0:
        # only gamma carries a radical: one isqrt, then integer progression
        t = a0 * a0 * d
        r = math.isqrt(t)
        if a0 < 0:
            r = -r if r * r == t else -r - 1
        return [(r + b0 + b1 * x) // den for x in range(N + 1)]
    out = []
    for x in range(N + 1):
        a = a1 * x + a0
        t = a * a * d
        r = math.isqrt(t)
        if a < 0:
            r = -r if r * r == t else -r - 1
        out.append((r + b0 + b1 * x) // den)
    return out


def _beta_value(beta):
    if isinstance(beta, Slope):
        return SurdValue.rational(beta.value)
    if isinstance(beta, SurdSqrt):
        return beta.beta
    if isinstance(beta, FloatSlope):
        return beta.beta
    if isinstance(beta, float):
        return mpmath.mpf(beta)
    return as_surd(beta)


def hull_under_line(query: HullQuery, prec: int = DEFAULT_PREC) -> HullSummary:
    """Hull of the nonnegative lattice points under y = beta*x + gamma, 0 <= x <= N.

    ``beta`` may be a Slope, SurdSqrt, FloatSlope or any exact scalar;
    ``gamma`` an exact scalar or float.  Exact floors are used whenever beta
    and gamma share a radicand, otherwise ``prec``-bit fixed point with
    near-integer columns reported in ``heights_flagged``.
    """
    beta = _beta_value(query.beta)
    gamma = query.gamma
    if not isinstance(gamma, (float, mpmath.mpf)):
        gamma = as_surd(gamma)
    if (beta.sign() if isinstance(beta, SurdValue) else (1 if beta > 0 else -1)) <= 0:
        raise ValueError("beta must be positive")
    if (gamma.sign() if isinstance(gamma, SurdValue) else (1 if gamma >= 0 else -1)) < 0:
        raise ValueError("gamma must be nonnegative")
    if isinstance(beta, SurdValue) and isinstance(gamma, SurdValue):
        try:
            return hull_from_heights(_exact_line_floors(beta, gamma, query.N))
        except ValueError:
            pass
    with mpmath.workprec(prec + 64):
        b = beta.to_mpf(prec // 3 + 30) if isinstance(beta, SurdValue) else mpmath.mpf(beta)
        g = gamma.to_mpf(prec // 3 + 30) if isinstance(gamma, SurdValue) else mpmath.mpf(gamma)
        # floor(g + x b) = floor(top - k*step) with top = g + N b, step = -b reversed
        top = g + query.N * b
        floors, flagged = fixed_point_floors(top, b, prec, count=query.N + 1)
    floors.reverse()
    return hull_from_heights(floors, [query.N - k for k in flagged])


def triangle_hull(alpha, slope, prec: int | None = None) -> HullSummary:
    """Hull of the triangle's lattice points moved to the C_{beta,gamma}(K) frame.

    Column x holds the triangle column k = K - x; x = K is the excluded
    y-axis column, so ``D`` counts exactly the triangle's positive hull
    boundary points and ``I + D`` equals the lattice point count.
    """
    heights, flagged = column_heights(alpha, slope, prec)
    heights = list(reversed(heights))
    K = len(heights) - 1
    return hull_from_heights(heights, [K - k for k in flagged])


def boundary_density(alpha, slope, prec: int | None = None) -> float:
    """D/alpha: positive lattice points on the hull boundary per unit alpha."""
    alpha = AreaParam.of(alpha)
    summary = triangle_hull(alpha, slope, prec)
    return summary.D / float(alpha)


def segment_decomposition(summary: HullSummary) -> list[tuple[Slope | Fraction, int, int]]:
    """(slope, multiplicity, x-length) per maximal segment, slopes increasing.

    Slope 0 edges cannot be a :class:`Slope`, so they come back as Fraction(0).
    """
    out = []
    for seg in summary.segments:
        sl = Slope(seg.p, seg.q) if seg.p > 0 else Fraction(0)
        out.append((sl, seg.n, seg.x_length))
    return out


# -- Pick on arbitrary polygons ---------------------------------------------


@dataclass(frozen=True)
class PickReport:
    A: Fraction
    B: int
    I: int
    identity_holds: bool
    brute_I: int | None = None
    brute_B: int | None = None


def _segments_intersect(p1, p2, p3, p4) -> bool:
    d1 = _cross(p3, p4, p1)
    d2 = _cross(p3, p4, p2)
    d3 = _cross(p1, p2, p3)
    d4 = _cross(p1, p2, p4)
    if ((d1 > 0 and d2 < 0) or (d1 < 0 and d2 > 0)) and ((d3 > 0 and d4 < 0) or (d3 < 0 and d4 > 0)):
        return True

    def on_seg(a, b, c):
        return min(a[0], b[0]) <= c[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= c[1] <= max(a[1], b[1])

    return (
        (d1 == 0 and on_seg(p3, p4, p1))
        or (d2 == 0 and on_seg(p3, p4, p2))
        or (d3 == 0 and on_seg(p1, p2, p3))
        or (d4 == 0 and on_seg(p1, p2, p4))
    )


def _check_simple(vs) -> None:
    n = len(vs)
    if n < 3:
        raise ValueError("polygon needs at least 3 vertices")
    if len(set(vs)) != n:
        raise ValueError("repeated vertex")
    edges = [(vs[i], vs[(i + 1) % n]) for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if j == i + 1 or (i == 0 and j == n - 1):
                # neighbours share a vertex; they may only overlap there
                a, b = edges[i]
                c, d = edges[j]
                shared = b if j == i + 1 else a
                other = d if j == i + 1 else c
                if _cross(a, b, other) == 0 and _cross(c, d, a if shared == b else b) == 0:
                    # collinear neighbours: fine only if they point away from each other
                    u = (b[0] - a[0], b[1] - a[1])
                    v = (d[0] - c[0], d[1] - c[1])
                    if u[0] * v[0] + u[1] * v[1] < 0:
                        raise ValueError("polygon folds back on itself")
                continue
            if _segments_intersect(*edges[i], *edges[j]):
                raise ValueError("polygon is not simple")


def brute_force_counts(vertices) -> tuple[int, int]:
    """(interior, boundary) lattice point counts by testing every box point."""
    vs = np.asarray(vertices, dtype=np.int64)
    xs = np.arange(vs[:, 0].min(), vs[:, 0].max() + 1)
    ys = np.arange(vs[:, 1].min(), vs[:, 1].max() + 1)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    X = X.ravel()
    Y = Y.ravel()
    on_edge = np.zeros(X.shape, dtype=bool)
    inside = np.zeros(X.shape, dtype=bool)
    n = len(vs)
    for i in range(n):
        x1, y1 = vs[i]
        x2, y2 = vs[(i + 1) % n]
        cr = (x2 - x1) * (Y - y1) - (y2 - y1) * (X - x1)
        within = (np.minimum(x1, x2) <= X) & (X <= np.maximum(x1, x2)) & (np.minimum(y1, y2) <= Y) & (Y <= np.maximum(y1, y2))
        on_edge |= (cr == 0) & within
        # crossing test on a rightward ray, half-open in y
        if y1 != y2:
            up = (y1 <= Y) & (Y < y2)
            down = (y2 <= Y) & (Y < y1)
            # point is left of the edge in the direction of travel
            inside ^= (up & (cr > 0)) | (down & (cr < 0))
    interior = int(np.count_nonzero(inside & ~on_edge))
    return interior, int(np.count_nonzero(on_edge))


def pick_check(poly, brute_limit: int = 10**6) -> PickReport:
    """Shoelace area, gcd boundary count and Pick interior count of a lattice polygon.

    When the bounding box holds at most ``brute_limit`` points the counts
    are cross-checked by direct enumeration.
    """
    vs = poly.vertices if isinstance(poly, LatticePolygon) else tuple((int(x), int(y)) for x, y in poly)
    _check_simple(vs)
    n = len(vs)
    area2 = 0
    B = 0
    for i in range(n):
        x1, y1 = vs[i]
        x2, y2 = vs[(i + 1) % n]
        area2 += x1 * y2 - x2 * y1
        B += math.gcd(x2 - x1, y2 - y1)
    A = Fraction(abs(area2), 2)
    if A == 0:
        raise ValueError("polygon has zero area")
    I = A - Fraction(B, 2) + 1
    w = max(v[0] for v in vs) - min(v[0] for v in vs) + 1
    h = max(v[1] for v in vs) - min(v[1] for v in vs) + 1
    bi = bb = None
    holds = I.denominator == 1
    if w * h <= brute_limit:
        bi, bb = brute_force_counts(vs)
        holds = holds and bi == I and bb == B
    return PickReport(A, B, int(I) if I.denominator == 1 else I, holds, bi, bb)
