"""Exact integers, rationals and quadratic surds.

Every exact scalar in the package is a :class:`SurdValue`, a number of the
form ``(a*sqrt(n) + b)/c`` with Python integers.  Floors and signs are decided
with integer square roots only; nothing in this module touches a float except
the explicit conversion helpers.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from functools import lru_cache
from numbers import Rational

import mpmath

__all__ = [
    "SurdValue",
    "isqrt",
    "surd_floor",
    "surd_sign",
    "squarefree_split",
    "parse_scalar",
    "as_surd",
    "set_trial_bound",
]

_TRIAL_BOUND = 10_000
_PRIMES: list[int] = []


def _sieve(limit: int) -> list[int]:
    flags = bytearray([1]) * (limit + 1)
    flags[0:2] = b"\x00\x00"
    for i in range(2, math.isqrt(limit) + 1):
        if flags[i]:
            flags[i * i :: i] = bytearray(len(flags[i * i :: i]))
    return [i for i, f in enumerate(flags) if f]


def set_trial_bound(bound: int) -> None:
    """Change the largest prime used when extracting square factors."""
    global _TRIAL_BOUND, _PRIMES
    _TRIAL_BOUND = int(bound)
    _PRIMES = _sieve(_TRIAL_BOUND)
    squarefree_split.cache_clear()


_PRIMES = _sieve(_TRIAL_BOUND)


def isqrt(x: int) -> int:
    """Exact floor of the square root of a nonnegative integer."""
    x = int(x)
    if x < 0:
        raise ValueError(f"isqrt of negative number {x}")
    return math.isqrt(x)


@lru_cache(maxsize=1 << 16)
def squarefree_split(n: int) -> tuple[int, int]:
    """Return ``(s, m)`` with ``n == s*s*m``.

    ``m`` is squarefree as far as trial division by primes up to the
    configured bound can tell; a leftover cofactor that is a perfect square
    is folded into ``s`` as well.
    """
    if n < 0:
        raise ValueError("radicand must be nonnegative")
    if n < 2:
        return 1, n
    s = 1
    m = 1
    rest = n
    for p in _PRIMES:
        if p * p > rest:
            break
        if rest % p:
            continue
        e = 0
        while rest % p == 0:
            rest //= p
            e += 1
        s *= p ** (e // 2)
        if e % 2:
            m *= p
    r = math.isqrt(rest)
    if r * r == rest:
        s *= r
    else:
        m *= rest
    return s, m


def surd_sign(a1: int, n1: int, a2: int = 0, n2: int = 0, b: int = 0) -> int:
    """Exact sign of ``a1*sqrt(n1) + a2*sqrt(n2) + b``.

    Radicands need not be squarefree.  At most two isolate-and-square steps
    are taken.
    """
    if a1 == 0 or n1 == 0:
        return _sign1(a2, n2, b)
    if a2 == 0 or n2 == 0:
        return _sign1(a1, n1, b)
    u = _sign_pair(a1, n1, a2, n2)
    sb = (b > 0) - (b < 0)
    if u == 0:
        return sb
    if sb == 0 or sb == u:
        return u
    # |S| versus |b| where S = a1 sqrt(n1) + a2 sqrt(n2)
    d = _sign1(2 * a1 * a2, n1 * n2, a1 * a1 * n1 + a2 * a2 * n2 - b * b)
    if d > 0:
        return u
    if d < 0:
        return -u
    return 0


def _sign1(a: int, n: int, b: int) -> int:
    # sign of a*sqrt(n) + b
    sa = 0 if (a == 0 or n == 0) else ((a > 0) - (a < 0))
    sb = (b > 0) - (b < 0)
    if sa == 0:
        return sb
    if sb == 0 or sa == sb:
        return sa
    lhs = a * a * n
    rhs = b * b
    if lhs > rhs:
        return sa
    if lhs < rhs:
        return sb
    return 0


def _sign_pair(a1: int, n1: int, a2: int, n2: int) -> int:
    s1 = (a1 > 0) - (a1 < 0)
    s2 = (a2 > 0) - (a2 < 0)
    if s1 == s2:
        return s1
    lhs = a1 * a1 * n1
    rhs = a2 * a2 * n2
    if lhs > rhs:
        return s1
    if lhs < rhs:
        return s2
    return 0


def _to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


class SurdValue:
    """The real number ``(a*sqrt(n) + b)/c``.

    Instances are normalized on construction: ``c > 0``, ``n`` squarefree (or
    0 for rationals, in which case ``a == 0``) and ``gcd(a, b, c) == 1``.
    """

    __slots__ = ("a", "b", "c", "n")

    def __init__(self, a: int = 0, b: int = 0, c: int = 1, n: int = 0):
        a, b, c, n = int(a), int(b), int(c), int(n)
        if c == 0:
            raise ZeroDivisionError("SurdValue with zero denominator")
        if n < 0:
            raise ValueError("negative radicand")
        if c < 0:
            a, b, c = -a, -b, -c
        if a == 0 or n == 0:
            a, n = 0, 0
        else:
            s, m = squarefree_split(n)
            a *= s
            if m == 1:
                b += a
                a, n = 0, 0
            else:
                n = m
        g = math.gcd(math.gcd(a, b), c)
        if g > 1:
            a //= g
            b //= g
            c //= g
        self.a, self.b, self.c, self.n = a, b, c, n

    # -- constructors -------------------------------------------------
    @classmethod
    def rational(cls, x) -> "SurdValue":
        f = _to_fraction(x)
        return cls(0, f.numerator, f.denominator, 0)

    @classmethod
    def from_parts(cls, rad, n: int, rat=0) -> "SurdValue":
        """Build ``rad*sqrt(n) + rat`` from rational coefficients."""
        rad = _to_fraction(rad)
        rat = _to_fraction(rat)
        den = rad.denominator * rat.denominator // math.gcd(rad.denominator, rat.denominator)
        return cls(rad.numerator * (den // rad.denominator), rat.numerator * (den // rat.denominator), den, n)

    @classmethod
    def sqrt(cls, x) -> "SurdValue":
        """Square root of a nonnegative rational."""
        f = _to_fraction(x)
        if f < 0:
            raise ValueError("square root of a negative rational")
        # sqrt(p/q) = sqrt(p*q)/q
        return cls(1, 0, f.denominator, f.numerator * f.denominator)

    # -- views --------------------------------------------------------
    @property
    def is_rational(self) -> bool:
        return self.a == 0

    def as_fraction(self) -> Fraction:
        if self.a:
            raise ValueError(f"{self} is irrational")
        return Fraction(self.b, self.c)

    def parts(self) -> tuple[Fraction, Fraction]:
        """``(radical coefficient, rational part)``."""
        return Fraction(self.a, self.c), Fraction(self.b, self.c)

    def sign(self) -> int:
        return _sign1(self.a, self.n, self.b)

    def conjugate(self) -> "SurdValue":
        return SurdValue(-self.a, self.b, self.c, self.n)

    # -- arithmetic ---------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, SurdValue):
            return other
        if isinstance(other, (int, Fraction)) or isinstance(other, Rational):
            return SurdValue.rational(other)
        return None

    def _common_radicand(self, other: "SurdValue") -> int:
        if self.n == other.n or other.n == 0:
            return self.n
        if self.n == 0:
            return other.n
        raise ValueError(f"cannot combine sqrt({self.n}) and sqrt({other.n}) in one surd")

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        n = self._common_radicand(o)
        return SurdValue(self.a * o.c + o.a * self.c, self.b * o.c + o.b * self.c, self.c * o.c, n)

    __radd__ = __add__

    def __neg__(self):
        return SurdValue(-self.a, -self.b, self.c, self.n)

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.n == o.n or self.n == 0 or o.n == 0:
            n = self.n or o.n
            # (a1 r + b1)(a2 r + b2) with r^2 = n
            rad = self.a * o.b + o.a * self.b
            rat = self.b * o.b + self.a * o.a * n
            return SurdValue(rad, rat, self.c * o.c, n)
        if self.b == 0 and o.b == 0:
            return SurdValue(self.a * o.a, 0, self.c * o.c, self.n * o.n)
        raise ValueError(f"product of sqrt({self.n}) and sqrt({o.n}) terms is not a single surd")

    __rmul__ = __mul__

    def reciprocal(self) -> "SurdValue":
        if self.a == 0:
            if self.b == 0:
                raise ZeroDivisionError("reciprocal of zero")
            return SurdValue(0, self.c, self.b, 0)
        # c / (a r + b) = c (a r - b) / (a^2 n - b^2)
        den = self.a * self.a * self.n - self.b * self.b
        return SurdValue(self.c * self.a, -self.c * self.b, den, self.n)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.reciprocal()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.reciprocal()

    def square(self) -> "SurdValue":
        return self * self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.reciprocal() ** (-k)
        out = SurdValue(0, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # -- comparisons --------------------------------------------------
    def compare(self, other) -> int:
        o = self._coerce(other)
        if o is None:
            raise TypeError(f"cannot compare SurdValue with {type(other).__name__}")
        # self - other scaled by c1*c2
        return surd_sign(self.a * o.c, self.n, -o.a * self.c, o.n, self.b * o.c - o.b * self.c)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self.a, self.b, self.c, self.n) == (o.a, o.b, o.c, o.n)

    def __hash__(self):
        if self.a == 0:
            return hash(Fraction(self.b, self.c))
        return hash((self.a, self.b, self.c, self.n))

    def __lt__(self, other):
        return self.compare(other) < 0

    def __le__(self, other):
        return self.compare(other) <= 0

    def __gt__(self, other):
        return self.compare(other) > 0

    def __ge__(self, other):
        return self.compare(other) >= 0

    def __bool__(self):
        return self.a != 0 or self.b != 0

    # -- rounding and conversion -------------------------------------
    def __floor__(self) -> int:
        return surd_floor(self)

    def __ceil__(self) -> int:
        return -surd_floor(-self)

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def to_mpf(self, dps: int = 50):
        with mpmath.workdps(dps):
            v = (mpmath.mpf(self.a) * mpmath.sqrt(self.n) + self.b) / self.c
        return v

    def __float__(self) -> float:
        if self.a == 0:
            return self.b / self.c
        return float(self.to_mpf(40))

    def __repr__(self):
        return f"SurdValue({self.a}, {self.b}, {self.c}, {self.n})"

    def __str__(self):
        return self.to_text()

    def to_text(self) -> str:
        """Render in the text grammar accepted by :func:`parse_scalar`."""
        if self.a == 0:
            return str(self.b) if self.c == 1 else f"{self.b}/{self.c}"
        if self.b == 0:
            coef = {1: "", -1: "-"}.get(self.a, f"{self.a}*")
            rad = f"{coef}sqrt({self.n})"
            return rad if self.c == 1 else f"({rad})/{self.c}"
        coef = {1: "", -1: "-"}.get(self.a, f"{self.a}*")
        sign = "+" if self.b > 0 else "-"
        body = f"({coef}sqrt({self.n}){sign}{abs(self.b)})"
        return body if self.c == 1 else f"{body}/{self.c}"


def surd_floor(x: SurdValue) -> int:
    """Exact floor of ``(a*sqrt(n) + b)/c``."""
    if x.a == 0:
        return x.b // x.c
    t = x.a * x.a * x.n
    r = math.isqrt(t)
    if x.a > 0:
        fl = r
    else:
        fl = -r if r * r == t else -r - 1
    return (fl + x.b) // x.c


def as_surd(x) -> SurdValue:
    """Coerce ints, Fractions, decimal strings and grammar strings to SurdValue."""
    if isinstance(x, SurdValue):
        return x
    if isinstance(x, str):
        return parse_scalar(x)
    if isinstance(x, float):
        raise TypeError("floats are not exact; pass a string or Fraction instead")
    return SurdValue.rational(x)


# -- text grammar ---------------------------------------------------------

_RAT = r"[+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?(?:/\d+)?"
_RE_RAT = re.compile(rf"^{_RAT}$")
_RE_RSQRT = re.compile(rf"^(?:(?P<r>{_RAT})\s*\*\s*)?(?P<neg>-)?sqrt\(\s*(?P<n>\d+)\s*\)$")
_RE_WRAPPED = re.compile(r"^\((?P<inner>.*)\)(?:/(?P<c>\d+))?$")
_RE_OVER = re.compile(r"^(?P<inner>[+-]?\d*\*?sqrt\(\d+\))/(?P<c>\d+)$")
_RE_RAD_FIRST = re.compile(r"^(?P<a>[+-]?\d*)\*?sqrt\((?P<d>\d+)\)(?P<b>[+-]\d+)?$")
_RE_RAT_FIRST = re.compile(r"^(?P<b>[+-]?\d+)(?P<a>[+-]\d*)\*?sqrt\((?P<d>\d+)\)$")


def _parse_rational(text: str) -> Fraction:
    if "/" in text:
        num, den = text.split("/")
        return Fraction(num) / Fraction(den)
    return Fraction(text)


def parse_scalar(text: str) -> SurdValue:
    """Parse ``INT``, ``INT/INT``, decimals, ``R*sqrt(N)`` or ``(A*sqrt(D)+B)/C``.

    Decimal literals are read exactly: ``15541.957707`` is 15541957707/10**6.
    """
    s = text.strip().replace(" ", "")
    if not s:
        raise ValueError("empty scalar")
    if _RE_RAT.match(s):
        return SurdValue.rational(_parse_rational(s))
    m = _RE_RSQRT.match(s)
    if m:
        r = _parse_rational(m.group("r")) if m.group("r") else Fraction(1)
        if m.group("neg"):
            r = -r
        return SurdValue.from_parts(r, int(m.group("n")))
    c = 1
    w = _RE_WRAPPED.match(s) or _RE_OVER.match(s)
    if w:
        s = w.group("inner")
        c = int(w.group("c")) if w.group("c") else 1
    m = _RE_RAD_FIRST.match(s) or _RE_RAT_FIRST.match(s)
    if m:
        a_txt = m.group("a")
        a = int(a_txt + "1") if a_txt in ("", "+", "-") else int(a_txt)
        b = int(m.group("b")) if m.group("b") else 0
        return SurdValue(a, b, c, int(m.group("d")))
    raise ValueError(f"cannot parse exact scalar {text!r}")
