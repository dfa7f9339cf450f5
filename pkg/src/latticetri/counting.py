"""Counting positive lattice points in the right triangle of area alpha**2/2.

The triangle has vertices (0,0), (alpha/sqrt(beta), 0) and (0, alpha*sqrt(beta));
``N_beta(alpha)`` counts the points (k, m) with k, m >= 1 and
``m <= alpha*sqrt(beta) - k*beta`` (hypotenuse included).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import partial
from typing import Sequence, Union

import mpmath

from ._parallel import pmap
from .exactnum import SurdValue, as_surd, parse_scalar, squarefree_split, surd_floor

__all__ = [
    "Slope",
    "AreaParam",
    "SurdSqrt",
    "FloatSlope",
    "SlopeSpec",
    "DeficitPoint",
    "AmbiguousCountWarning",
    "as_slope_spec",
    "floor_sum",
    "count_positive_solutions",
    "count_lattice_points",
    "count_scaled",
    "count_with_flags",
    "column_heights",
    "fixed_point_floors",
    "deficit",
    "deficit_exact",
    "rational_coefficient",
    "irrational_limit_coefficient",
    "deficit_curve",
]

DEFAULT_PREC = 128
AMBIGUITY_BITS = 40


class AmbiguousCountWarning(UserWarning):
    """A float-mode column value landed within 2**-40 of an integer."""


@dataclass(frozen=True, order=True)
class Slope:
    """Rational slope p/q in lowest terms."""

    p: int
    q: int

    def __post_init__(self):
        if self.p < 1 or self.q < 1:
            raise ValueError(f"slope {self.p}/{self.q} must have positive p and q")
        if math.gcd(self.p, self.q) != 1:
            raise ValueError(f"slope {self.p}/{self.q} is not in lowest terms")

    @classmethod
    def of(cls, x) -> "Slope":
        f = Fraction(x) if not isinstance(x, str) else parse_scalar(x).as_fraction()
        return cls(f.numerator, f.denominator)

    @property
    def value(self) -> Fraction:
        return Fraction(self.p, self.q)

    def __float__(self):
        return self.p / self.q

    def __str__(self):
        return f"{self.p}/{self.q}"

    def swapped(self) -> "Slope":
        return Slope(self.q, self.p)


@dataclass(frozen=True)
class AreaParam:
    """Area parameter alpha = r*sqrt(n), r > 0 rational, n squarefree."""

    r: Fraction
    n: int = 1

    def __post_init__(self):
        r = Fraction(self.r)
        object.__setattr__(self, "r", r)
        if r <= 0:
            raise ValueError("area parameter must be positive")
        if self.n < 1:
            raise ValueError("radicand must be >= 1")
        s, m = squarefree_split(self.n)
        if s != 1:
            object.__setattr__(self, "r", r * s)
            object.__setattr__(self, "n", m)

    @classmethod
    def of(cls, x) -> "AreaParam":
        if isinstance(x, AreaParam):
            return x
        v = as_surd(x)
        if v.a == 0:
            return cls(v.as_fraction(), 1)
        if v.b != 0:
            raise ValueError(f"{v} is not of the form r*sqrt(n)")
        return cls(Fraction(v.a, v.c), v.n)

    @property
    def is_rational(self) -> bool:
        return self.n == 1

    def squared(self) -> Fraction:
        return self.r * self.r * self.n

    def as_surd(self) -> SurdValue:
        return SurdValue.from_parts(self.r, self.n) if self.n > 1 else SurdValue.rational(self.r)

    def to_mpf(self, dps: int = 50):
        with mpmath.workdps(dps):
            return mpmath.mpf(self.r.numerator) / self.r.denominator * mpmath.sqrt(self.n)

    def __float__(self):
        return float(self.to_mpf(30))

    def __lt__(self, other: "AreaParam"):
        return self.squared() < other.squared()

    def __le__(self, other: "AreaParam"):
        return self.squared() <= other.squared()

    def text(self) -> str:
        return self.as_surd().to_text()

    def __str__(self):
        return self.text()


@dataclass(frozen=True)
class SurdSqrt:
    """Slope given through its exact square root sqrt(beta)."""

    sqrt_beta: SurdValue

    def __post_init__(self):
        if self.sqrt_beta.sign() <= 0:
            raise ValueError("sqrt(beta) must be positive")

    @property
    def beta(self) -> SurdValue:
        return self.sqrt_beta * self.sqrt_beta


@dataclass(frozen=True)
class FloatSlope:
    """Slope as a high-precision real; counting is done with ``prec`` bits."""

    beta: object
    prec: int = DEFAULT_PREC

    def __post_init__(self):
        with mpmath.workprec(self.prec):
            b = self.beta
            if isinstance(b, Fraction):
                b = mpmath.mpf(b.numerator) / b.denominator
            elif isinstance(b, SurdValue):
                b = b.to_mpf(self.prec // 3 + 10)
            b = mpmath.mpf(b)
        if b <= 0:
            raise ValueError("beta must be positive")
        object.__setattr__(self, "beta", b)


SlopeSpec = Union[Slope, SurdSqrt, FloatSlope]


def as_slope_spec(x) -> SlopeSpec:
    """Coerce a Slope, Fraction, int, grammar string or SurdValue (read as beta)."""
    if isinstance(x, (Slope, SurdSqrt, FloatSlope)):
        return x
    if isinstance(x, float):
        return FloatSlope(x)
    v = as_surd(x)
    if v.is_rational:
        return Slope.of(v.as_fraction())
    root = _denest_sqrt(v)
    if root is None:
        return FloatSlope(v.to_mpf(60))
    return SurdSqrt(root)


def _denest_sqrt(v: SurdValue) -> SurdValue | None:
    """sqrt(v) as a single surd when it exists, else None."""
    # sqrt(x + y sqrt(n)) = sqrt(u) + sqrt(w), u + w = x, 4 u w = y^2 n
    x, y = v.parts()[1], v.parts()[0]
    disc = x * x - y * y * v.n
    if disc < 0:
        return None
    dr = _rational_sqrt(disc)
    if dr is None:
        return None
    u, w = (x + dr) / 2, (x - dr) / 2
    for rat, rad in ((u, w), (w, u)):
        rr = _rational_sqrt(rat)
        if rr is None or rad < 0:
            continue
        root = SurdValue.sqrt(rad)
        if y < 0:
            root = -root
        cand = root + rr
        if cand.sign() > 0 and cand * cand == v:
            return cand
    return None


def _rational_sqrt(f: Fraction) -> Fraction | None:
    if f < 0:
        return None
    a, b = math.isqrt(f.numerator), math.isqrt(f.denominator)
    if a * a == f.numerator and b * b == f.denominator:
        return Fraction(a, b)
    return None


# -- floor sums --------------------------------------------------------------


def floor_sum(n: int, m: int, a: int, b: int) -> int:
    """Sum of floor((a*i + b)/m) for i in range(n), in O(log) steps."""
    if n <= 0:
        return 0
    if m <= 0:
        raise ValueError("modulus must be positive")
    ans = 0
    if a < 0:
        a2 = a % m
        ans -= n * (n - 1) // 2 * ((a2 - a) // m)
        a = a2
    if b < 0:
        b2 = b % m
        ans -= n * ((b2 - b) // m)
        b = b2
    while True:
        if a >= m:
            ans += n * (n - 1) // 2 * (a // m)
            a %= m
        if b >= m:
            ans += n * (b // m)
            b %= m
        y_max = a * n + b
        if y_max < m:
            break
        n, b = y_max // m, y_max % m
        m, a = a, m
    return ans


def count_positive_solutions(p: int, q: int, bound: int) -> int:
    """#{(k, m) : k, m >= 1, p*k + q*m <= bound}."""
    rest = bound - p - q
    if rest < 0:
        return 0
    kmax = rest // p
    # k' = k - 1 runs 0..kmax; reversed so the floor-sum slope is positive
    return (kmax + 1) + floor_sum(kmax + 1, q, p, rest - p * kmax)


# -- counting ---------------------------------------------------------------


def _rational_bound(alpha: AreaParam, slope: Slope) -> int:
    # floor(alpha * sqrt(pq)) = floor(r sqrt(n p q))
    num, den = alpha.r.numerator, alpha.r.denominator
    return math.isqrt(num * num * alpha.n * slope.p * slope.q) // den


def _sum_column_floors(x: SurdValue, y: SurdValue) -> int:
    """Sum over k >= 1 of max(0, floor(x - k*y)) for y > 0, exactly."""
    d = x.n or y.n
    if x.n and y.n and x.n != y.n:
        raise ValueError("column values need a common radicand")
    den = x.c * y.c
    a0, a1 = x.a * y.c, y.a * x.c  # radical parts: a0 - k a1
    b0, b1 = x.b * y.c, y.b * x.c  # rational parts: b0 - k b1
    total = 0
    k = 1
    if d == 0:
        # purely rational line: sum floor((b0 - k b1)/den) while positive
        kmax = (b0 - den) // b1 if b1 > 0 else None
        if kmax is None or kmax < 1:
            return 0
        return floor_sum(kmax, den, -b1, b0 - b1)
    isq = math.isqrt
    while True:
        a = a0 - k * a1
        b = b0 - k * b1
        t = a * a * d
        r = isq(t)
        if a < 0:
            r = -r if r * r == t else -r - 1
        f = (r + b) // den
        if f < 1:
            break
        total += f
        k += 1
    return total


def count_scaled(alpha: AreaParam, t: SurdValue) -> int:
    """N_beta(alpha) at sqrt(beta) = sqrt(n)*t where alpha = r*sqrt(n).

    In this coordinate every column value r*n*t - k*n*t**2 is a single surd,
    so any SurdValue ``t`` is handled exactly.
    """
    if t.sign() <= 0:
        raise ValueError("t must be positive")
    n = alpha.n
    t2 = t * t
    if t2.is_rational:
        beta = t2.as_fraction() * n
        return count_lattice_points(alpha, Slope(beta.numerator, beta.denominator))
    x = t * (alpha.r * n)
    y = t2 * n
    return _sum_column_floors(x, y)


def _fixed_point(x, prec: int) -> int:
    """floor(x * 2**prec) for an mpf/SurdValue/Fraction x, using prec + 64 bits."""
    if isinstance(x, SurdValue):
        # exact: floor((a sqrt(n) + b) 2^P / c)
        return surd_floor(x * (1 << prec))
    if isinstance(x, Fraction):
        return (x.numerator << prec) // x.denominator
    with mpmath.workprec(prec + 64):
        return int(mpmath.floor(mpmath.mpf(x) * mpmath.mpf(2) ** prec))


def fixed_point_floors(top, step, prec: int, count: int | None = None):
    """Floors of ``top - k*step`` for k = 0, 1, ... while the value is >= 0.

    ``top`` and ``step`` are turned into ``prec``-bit fixed point integers, so
    each floor costs a shift.  Returns ``(floors, flagged)`` where ``flagged``
    lists the k whose value lies within 2**-40 (plus accumulated rounding) of
    an integer; those floors are not certified.
    """
    T = _fixed_point(top, prec)
    S = _fixed_point(step, prec)
    one = 1 << prec
    mask = one - 1
    tol_base = 1 << max(prec - AMBIGUITY_BITS, 0)
    floors = []
    flagged = []
    k = 0
    while count is None or k < count:
        v = T - k * S
        # true value lies in [v - (k+1), v + (k+1)] units of 2^-prec
        if v < -(k + 1):
            break
        f = v >> prec
        frac = v & mask
        tol = tol_base + k + 1
        if frac < tol or one - frac < tol:
            flagged.append(k)
        if v < 0:
            break
        floors.append(f)
        k += 1
    return floors, flagged


def _float_beta(beta, prec: int):
    with mpmath.workprec(prec + 64):
        if isinstance(beta, SurdValue):
            return beta.to_mpf(prec // 3 + 30)
        if isinstance(beta, Fraction):
            return mpmath.mpf(beta.numerator) / beta.denominator
        return mpmath.mpf(beta)


def _count_float(alpha: AreaParam, beta, prec: int) -> tuple[int, list[int]]:
    with mpmath.workprec(prec + 64):
        b = _float_beta(beta, prec)
        top = alpha.to_mpf(prec // 3 + 30) * mpmath.sqrt(b)
        floors, flagged = fixed_point_floors(top, b, prec)
    # column k = index; k = 0 is the axis column
    total = sum(f for f in floors[1:] if f >= 1)
    flagged = [k for k in flagged if k >= 1 and (k >= len(floors) or floors[k] >= 0)]
    return total, flagged


def count_with_flags(alpha, slope, prec: int | None = None) -> tuple[int, list[int]]:
    """Count plus the list of columns k whose float-mode value was ambiguous."""
    alpha = AreaParam.of(alpha)
    slope = as_slope_spec(slope)
    if isinstance(slope, Slope):
        return count_positive_solutions(slope.p, slope.q, _rational_bound(alpha, slope)), []
    if isinstance(slope, SurdSqrt):
        s = slope.sqrt_beta
        if s.n in (0, alpha.n) or alpha.n == 1:
            try:
                x = alpha.as_surd() * s
                y = s * s
                return _sum_column_floors(x, y), []
            except ValueError:
                pass
        beta = s.to_mpf(60) ** 2
        return _count_float(alpha, beta, prec or DEFAULT_PREC)
    return _count_float(alpha, slope.beta, prec or slope.prec)


def count_lattice_points(alpha, slope, prec: int | None = None) -> int:
    """N_beta(alpha): positive lattice points in the closed triangle.

    Exact for rational slopes (any alpha = r*sqrt(n)) and for surd square
    roots compatible with alpha; otherwise columns are floored with ``prec``
    bits and an :class:`AmbiguousCountWarning` is issued if any column value
    is within 2**-40 of an integer.
    """
    count, flagged = count_with_flags(alpha, slope, prec)
    if flagged:
        warnings.warn(
            f"float-mode count for alpha={alpha} has {len(flagged)} near-integer column(s): {flagged[:5]}",
            AmbiguousCountWarning,
            stacklevel=2,
        )
    return count


def _surd_column_floors(x: SurdValue, y: SurdValue) -> list[int]:
    """floor(x - k*y) for k = 0, 1, ... while x - k*y >= 0 (y > 0)."""
    d = x.n or y.n
    den = x.c * y.c
    a0, a1 = x.a * y.c, y.a * x.c
    b0, b1 = x.b * y.c, y.b * x.c
    out = []
    k = 0
    while True:
        a = a0 - k * a1
        b = b0 - k * b1
        t = a * a * d
        r = math.isqrt(t)
        if a < 0:
            r = -r if r * r == t else -r - 1
        num = r + b
        # num >= 0 iff a*sqrt(d) + b >= 0, since r = floor(a*sqrt(d))
        if num < 0:
            break
        out.append(num // den)
        k += 1
    return out


def column_heights(alpha, slope, prec: int | None = None) -> tuple[list[int], list[int]]:
    """Heights floor(alpha*sqrt(beta) - k*beta) for k = 0..K, K = floor(alpha/sqrt(beta)).

    Every listed height is >= 0.  The second item lists float-mode columns
    whose floors are not certified (empty in exact mode).
    """
    alpha = AreaParam.of(alpha)
    slope = as_slope_spec(slope)
    if isinstance(slope, Slope):
        L = _rational_bound(alpha, slope)
        return [(L - k * slope.p) // slope.q for k in range(L // slope.p + 1)], []
    if isinstance(slope, SurdSqrt):
        s = slope.sqrt_beta
        if s.n in (0, alpha.n) or alpha.n == 1:
            try:
                return _surd_column_floors(alpha.as_surd() * s, s * s), []
            except ValueError:
                pass
        beta = s * s
        p = prec or DEFAULT_PREC
    else:
        beta = slope.beta
        p = prec or slope.prec
    with mpmath.workprec(p + 64):
        b = _float_beta(beta, p)
        top = alpha.to_mpf(p // 3 + 30) * mpmath.sqrt(b)
        return fixed_point_floors(top, b, p)


# -- deficits ---------------------------------------------------------------


@dataclass(frozen=True)
class DeficitPoint:
    alpha: AreaParam
    count: int
    deficit: float
    exact: SurdValue
    predicted: float | None = None
    residual: float | None = None
    warnings: tuple = field(default=())


def deficit_exact(alpha: AreaParam, count: int) -> SurdValue:
    """(count - alpha**2/2)/alpha as an exact surd."""
    alpha = AreaParam.of(alpha)
    return (SurdValue.rational(count - alpha.squared() / 2)) / alpha.as_surd()


def deficit(alpha, slope, prec: int | None = None) -> DeficitPoint:
    alpha = AreaParam.of(alpha)
    count, flagged = count_with_flags(alpha, slope, prec)
    ex = deficit_exact(alpha, count)
    return DeficitPoint(alpha, count, float(ex), ex, warnings=tuple(flagged))


def rational_coefficient(slope: Slope, frac) -> SurdValue:
    """Linear coefficient (-sqrt(p/q) - sqrt(q/p) + (1 - 2*frac)/sqrt(pq))/2."""
    slope = Slope.of(slope.value) if isinstance(slope, Slope) else Slope.of(slope)
    f = as_surd(frac)
    if f < 0 or f >= 1:
        raise ValueError("frac must lie in [0, 1)")
    pq = slope.p * slope.q
    # all three radicals are rational multiples of sqrt(pq)
    return (1 - 2 * f - slope.p - slope.q) * SurdValue.sqrt(pq) / (2 * pq)


def irrational_limit_coefficient(sqrt_beta) -> SurdValue:
    """-(s + 1/s)/2 for s = sqrt(beta)."""
    s = as_surd(sqrt_beta)
    if s.sign() <= 0:
        raise ValueError("sqrt(beta) must be positive")
    return -(s + s.reciprocal()) / 2


def _rational_residual(alpha: AreaParam, slope: Slope, count: int):
    """Return (predicted coefficient, residual) as floats.

    With y = alpha*sqrt(pq) and L = floor(y), the residual
    N - alpha^2/2 - c*alpha equals N + (y^2 - (1 - p - q + 2L)*y)/(2pq).
    """
    p, q = slope.p, slope.q
    pq = p * q
    y = alpha.as_surd() * SurdValue.sqrt(pq)
    L = surd_floor(y)
    resid = count + (y * y - (1 - p - q + 2 * L) * y) / (2 * pq)
    frac = y - L
    with mpmath.workdps(40):
        coef = (1 - 2 * frac.to_mpf(40) - p - q) / (2 * mpmath.sqrt(pq))
    return float(coef), float(resid.to_mpf(40))


def _curve_point(alpha: AreaParam, slope: SlopeSpec, prec) -> DeficitPoint:
    pt = deficit(alpha, slope, prec)
    if isinstance(slope, Slope):
        coef, resid = _rational_residual(alpha, slope, pt.count)
        return DeficitPoint(pt.alpha, pt.count, pt.deficit, pt.exact, coef, resid, pt.warnings)
    return pt


def deficit_curve(slope, alphas: Sequence, workers: int = 1, prec: int | None = None) -> list[DeficitPoint]:
    """Deficits along an increasing list of area parameters.

    Rational slopes also get the predicted linear coefficient at each alpha
    and the residual N - alpha^2/2 - c*alpha.
    """
    slope = as_slope_spec(slope)
    alphas = [AreaParam.of(a) for a in alphas]
    for a, b in zip(alphas, alphas[1:]):
        if not a < b:
            raise ValueError("alphas must be strictly increasing")
    return pmap(partial(_curve_point, slope=slope, prec=prec), alphas, workers, chunksize=16)
