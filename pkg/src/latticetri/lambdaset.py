"""The set of good rational slopes: p/q with (p+q-1)**2 < 4pq.

For these slopes the deficit limsup, (-sqrt(p/q) - sqrt(q/p) + 1/sqrt(pq))/2,
exceeds -1.  Only finitely many members lie outside any neighbourhood of 1:
membership forces |q - p| <= 2*sqrt(q) + 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .counting import Slope, rational_coefficient
from .exactnum import SurdValue, as_surd

__all__ = [
    "LambdaElement",
    "lambda_membership",
    "lambda_element",
    "lambda_enumerate",
    "box_count",
    "box_count_details",
    "dimension_fit",
    "DimensionFit",
    "cover_bound",
]


@dataclass(frozen=True)
class LambdaElement:
    slope: Slope
    limsup_coeff: SurdValue
    period: SurdValue
    margin: int

    def row(self) -> dict:
        return {
            "slope": str(self.slope),
            "p": self.slope.p,
            "q": self.slope.q,
            "limsup_coeff": float(self.limsup_coeff),
            "margin": self.margin,
            "period": float(self.period),
        }


def _margin(p: int, q: int) -> int:
    return 4 * p * q - (p + q - 1) ** 2


def lambda_membership(slope: Slope) -> bool:
    """Integer test (p+q-1)**2 < 4pq; the boundary 9/4 (margin 0) is excluded."""
    return _margin(slope.p, slope.q) > 0


def lambda_element(slope: Slope) -> LambdaElement:
    coeff = rational_coefficient(slope, 0)
    return LambdaElement(slope, coeff, SurdValue.sqrt(Fraction(1, slope.p * slope.q)), _margin(slope.p, slope.q))


def _p_window(q: int) -> range:
    w = math.isqrt(4 * q)  # floor(2 sqrt(q))
    return range(max(1, q - w - 1), q + w + 2)


def lambda_enumerate(q_max: int) -> list[LambdaElement]:
    """All members with denominator q <= q_max, sorted by value."""
    if q_max < 1:
        raise ValueError("q_max must be >= 1")
    out = []
    for q in range(1, q_max + 1):
        for p in _p_window(q):
            if math.gcd(p, q) == 1 and _margin(p, q) > 0:
                out.append(lambda_element(Slope(p, q)))
    out.sort(key=lambda e: e.slope.value)
    return out


def _fourth_root_bounds(eps: Fraction) -> tuple[Fraction, Fraction]:
    """Rationals lo <= eps**(1/4) <= hi, within 2**-60."""
    scale = 1 << 60
    # floor(eps^(1/4) * 2^60) via integer 4th root of floor(eps * 2^240)
    x = (eps.numerator << 240) // eps.denominator
    r = math.isqrt(math.isqrt(x))
    while (r + 1) ** 4 <= x:
        r += 1
    while r**4 > x:
        r -= 1
    return Fraction(r, scale), Fraction(r + 1, scale)


def cover_bound(eps: Fraction) -> int:
    """Denominator bound ceil(9/sqrt(eps)) beyond which members sit near 1."""
    eps = Fraction(eps)
    # smallest Q with Q^2 * eps >= 81
    Q = math.isqrt(int(81 / eps))
    while Q * Q * eps < 81:
        Q += 1
    while Q > 0 and (Q - 1) ** 2 * eps >= 81:
        Q -= 1
    return Q


@dataclass(frozen=True)
class BoxCountDetails:
    epsilon: Fraction
    q_bound: int
    boxes: int
    central: tuple
    finite_members: int


def box_count_details(epsilon) -> BoxCountDetails:
    """ε-boxes (jε, (j+1)ε] meeting a cover of the set.

    The cover is the finite list of members with q <= ceil(9/sqrt(ε)) plus
    the central interval [1 - ε^(1/4), 1 + ε^(1/4)] clipped to [1/3, 3];
    every member with a larger denominator lies in that interval, so the
    count bounds the true box count from above.
    """
    eps = Fraction(epsilon)
    if not 0 < eps <= 1:
        raise ValueError("epsilon must lie in (0, 1]")
    Q = cover_bound(eps)
    lo4, hi4 = _fourth_root_bounds(eps)
    c_lo = max(Fraction(1, 3), 1 - hi4)
    c_hi = min(Fraction(3), 1 + hi4)
    # boxes j with (j eps, (j+1) eps] meeting [c_lo, c_hi]: j from ceil(c_lo/eps) - 1 to ceil(c_hi/eps) - 1
    j_lo = math.ceil(c_lo / eps) - 1
    j_hi = math.ceil(c_hi / eps) - 1
    boxes = set()
    n_members = 0
    for q in range(1, Q + 1):
        for p in _p_window(q):
            if math.gcd(p, q) != 1 or _margin(p, q) <= 0:
                continue
            n_members += 1
            v = Fraction(p, q)
            if c_lo <= v <= c_hi:
                continue
            boxes.add(math.ceil(v / eps) - 1)
    extra = sum(1 for j in boxes if not (j_lo <= j <= j_hi))
    return BoxCountDetails(eps, Q, (j_hi - j_lo + 1) + extra, (c_lo, c_hi), n_members)


def box_count(epsilon) -> int:
    return box_count_details(epsilon).boxes


@dataclass(frozen=True)
class DimensionFit:
    exponent: float
    intercept: float
    epsilons: tuple
    counts: tuple
    residuals: tuple


def dimension_fit(epsilons: Sequence) -> DimensionFit:
    """Least-squares slope of log N(ε) against log(1/ε).

    This is an upper-bound estimator: N(ε) counts boxes of a cover.
    """
    eps = [Fraction(e) for e in epsilons]
    if len(eps) < 3:
        raise ValueError("need at least 3 scales")
    if max(eps) / min(eps) < 100:
        raise ValueError("scales must span at least two decades")
    counts = [box_count(e) for e in eps]
    x = np.log([1 / float(e) for e in eps])
    y = np.log(np.asarray(counts, dtype=float))
    slope, icpt = np.polyfit(x, y, 1)
    resid = y - (slope * x + icpt)
    return DimensionFit(float(slope), float(icpt), tuple(eps), tuple(counts), tuple(float(r) for r in resid))


def limsup_exceeds(slope: Slope) -> bool:
    """Surd-side form of membership: limsup coefficient + 1 > 0."""
    return (lambda_element(slope).limsup_coeff + 1).sign() > 0


def outside_count(delta, q_limit: int) -> int:
    """Members with q <= q_limit lying outside (1 - delta, 1 + delta)."""
    d = as_surd(delta).as_fraction() if not isinstance(delta, Fraction) else delta
    n = 0
    for q in range(1, q_limit + 1):
        for p in _p_window(q):
            if math.gcd(p, q) == 1 and _margin(p, q) > 0 and abs(Fraction(p, q) - 1) >= d:
                n += 1
    return n
