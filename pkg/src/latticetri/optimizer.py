"""Maximizing N_beta(alpha) over the slope for a fixed area parameter.

A point (k, m) lies in the closed triangle exactly when -k s**2 + alpha s - m >= 0
with s = sqrt(beta), so each point is captured on a closed s-interval and the
best slopes are found by a max-stabbing sweep over interval endpoints.

Internally positions use t = s/sqrt(n) for alpha = r*sqrt(n): the endpoints
(r n -+ sqrt(r^2 n^2 - 4 k n m))/(2 k n) are then single surds and can be
ordered exactly.

Two engines share the run-extraction logic:

* ``stream``: per-k endpoint streams merged with a heap, keyed by the exact
  integer floor(t * 2**128) with an exact tiebreak.  Memory is O(number of k).
* ``window``: numpy arrays of float64 endpoints for s-chunks, sorted, with
  every cluster of endpoints closer than 2**-40 (relative) re-ordered exactly.
"""

from __future__ import annotations

import functools
import heapq
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import partial
from typing import Iterable, Iterator, Sequence

import numpy as np

from ._parallel import pmap
from .counting import AreaParam, Slope, count_lattice_points, count_scaled, deficit_exact
from .exactnum import SurdValue, as_surd, surd_floor

__all__ = [
    "CaptureInterval",
    "ArgmaxReport",
    "GoodSlopeQuery",
    "BudgetExceeded",
    "capture_interval",
    "enumerate_intervals",
    "argmax_slope",
    "argmax_bruteforce_oracle",
    "limit_set_scan",
    "good_slope_analysis",
    "simplest_rational",
    "projected_intervals",
    "sweep_runs",
    "window_max",
]

KEY_BITS = 128
CLUSTER_REL = 2.0**-40
DEFAULT_RANGE = (Fraction(1, 2), Fraction(2))

START, END = 0, 1


class BudgetExceeded(RuntimeError):
    """The sweep would process more intervals than the configured budget."""


# -- exact geometry of capture intervals --------------------------------------


class _Ctx:
    """Integer view of alpha = (u/v) sqrt(n) used by both engines."""

    def __init__(self, alpha: AreaParam):
        self.alpha = alpha
        self.u, self.v = alpha.r.numerator, alpha.r.denominator
        self.n = alpha.n
        self.sq = alpha.squared()  # alpha^2 as a Fraction
        self.A = self.u * self.u * self.n * self.n  # (r n)^2 v^2
        self.B = self.v * self.v
        self.R = alpha.r * self.n  # t-space linear coefficient

    def disc(self, k: int, m: int) -> int:
        """v^2 (r^2 n^2 - 4 k n m); the interval exists iff this is >= 0."""
        return self.A - 4 * k * self.n * m * self.B

    def root(self, k: int, m: int, side: int) -> SurdValue:
        """Exact t-endpoint; side -1 for the lower, +1 for the upper root."""
        d = self.disc(k, m)
        s, core = _split(d)
        return SurdValue(side * s, self.u * self.n, 2 * k * self.n * self.v, core)

    def key(self, k: int, m: int, side: int) -> int:
        """floor(t * 2**KEY_BITS) of a root, exactly."""
        d = self.disc(k, m)
        r = math.isqrt(d << (2 * KEY_BITS))
        if side < 0:
            r = -r if r * r == d << (2 * KEY_BITS) else -r - 1
        return ((self.u * self.n << KEY_BITS) + r) // (2 * k * self.n * self.v)

    def t_of_s(self, s) -> SurdValue:
        s = as_surd(s)
        if self.n == 1:
            return s
        return s * SurdValue.from_parts(Fraction(1, self.n), self.n)

    def V(self, k: int, t: SurdValue) -> SurdValue:
        """Column value r n t - k n t^2 at t."""
        return t * self.R - t * t * (k * self.n)

    def vertex_t(self, k: int) -> Fraction:
        return self.alpha.r / (2 * k)

    def vertex_value(self, k: int) -> Fraction:
        return self.sq / (4 * k)


def _split(d: int) -> tuple[int, int]:
    if d == 0:
        return 0, 0
    r = math.isqrt(d)
    if r * r == d:
        return r, 1
    return 1, d


def _beta_of_t(ctx: _Ctx, t: SurdValue) -> SurdValue:
    return t * t * ctx.n


@dataclass(frozen=True)
class CaptureInterval:
    """Closed set of slopes capturing ``point``.

    ``t_lo``/``t_hi`` are exact in the coordinate t = s/sqrt(n) (so s itself
    when alpha is rational); ``beta_lo``/``beta_hi`` are exact slopes.
    """

    point: tuple
    alpha: AreaParam
    t_lo: SurdValue
    t_hi: SurdValue

    @property
    def scale(self) -> int:
        return self.alpha.n

    @property
    def beta_lo(self) -> SurdValue:
        return self.t_lo * self.t_lo * self.alpha.n

    @property
    def beta_hi(self) -> SurdValue:
        return self.t_hi * self.t_hi * self.alpha.n

    @property
    def s_lo(self):
        return self.t_lo if self.alpha.n == 1 else math.sqrt(self.alpha.n) * float(self.t_lo)

    @property
    def s_hi(self):
        return self.t_hi if self.alpha.n == 1 else math.sqrt(self.alpha.n) * float(self.t_hi)

    @property
    def degenerate(self) -> bool:
        return self.t_lo.compare(self.t_hi) == 0


def capture_interval(point, alpha) -> CaptureInterval | None:
    """Closed slope interval on which ``point`` = (k, m) lies in the triangle."""
    k, m = point
    if k < 1 or m < 1:
        raise ValueError("point must have positive coordinates")
    alpha = AreaParam.of(alpha)
    ctx = _Ctx(alpha)
    if ctx.disc(k, m) < 0:
        return None
    return CaptureInterval((k, m), alpha, ctx.root(k, m, -1), ctx.root(k, m, 1))


def _normalize_range(s_range) -> tuple[SurdValue, SurdValue]:
    lo, hi = (as_surd(x) for x in (s_range or DEFAULT_RANGE))
    if lo.sign() <= 0 or lo.compare(hi) > 0:
        raise ValueError("s_range must be a nonempty interval in (0, inf)")
    return lo, hi


def _m_bounds(ctx: _Ctx, k: int, ta: SurdValue, tb: SurdValue):
    """(m_a, m_b, m_max, vertex position) for column k on [ta, tb].

    m_a = floor V(ta), m_b = floor V(tb), m_max = floor of the max of V on the
    range; position is -1/0/+1 for vertex left of / inside / right of it.
    """
    tv = SurdValue.rational(ctx.vertex_t(k))
    ma = surd_floor(ctx.V(k, ta))
    mb = surd_floor(ctx.V(k, tb))
    if tv.compare(ta) < 0:
        return ma, mb, ma, -1
    if tv.compare(tb) > 0:
        return ma, mb, mb, 1
    vv = ctx.vertex_value(k)
    return ma, mb, vv.numerator // vv.denominator, 0


def enumerate_intervals(alpha, s_range=None) -> Iterator[CaptureInterval]:
    """Capture intervals meeting ``s_range``, by increasing k then increasing m."""
    alpha = AreaParam.of(alpha)
    ctx = _Ctx(alpha)
    sa, sb = _normalize_range(s_range)
    ta, tb = ctx.t_of_s(sa), ctx.t_of_s(sb)
    k = 1
    while True:
        _, _, mmax, _ = _m_bounds(ctx, k, ta, tb)
        if mmax < 1:
            return
        for m in range(1, mmax + 1):
            yield CaptureInterval((k, m), alpha, ctx.root(k, m, -1), ctx.root(k, m, 1))
        k += 1


def projected_intervals(alpha, s_range=None) -> int:
    """Number of capture intervals meeting ``s_range`` (exact, O(#k) work)."""
    alpha = AreaParam.of(alpha)
    ctx = _Ctx(alpha)
    sa, sb = _normalize_range(s_range)
    ta, tb = ctx.t_of_s(sa), ctx.t_of_s(sb)
    total = 0
    k = 1
    while True:
        mmax = _m_bounds(ctx, k, ta, tb)[2]
        if mmax < 1:
            return total
        total += mmax
        k += 1


# -- event ordering ------------------------------------------------------------
#
# An event is (key, type, k, m, side): side 0 marks a start clamped to the left
# end of the range; otherwise it is the root of (k, m) on that side.


def _event_value(ctx: _Ctx, ta: SurdValue, ev) -> SurdValue:
    side = ev[4]
    return ta if side == 0 else ctx.root(ev[2], ev[3], side)


def _exact_sorted(ctx: _Ctx, ta: SurdValue, group: list) -> list:
    """Order events by exact position, starts before ends at equal positions."""
    if len(group) < 2:
        return group
    vals = [_event_value(ctx, ta, e) for e in group]
    if all(v.compare(vals[0]) == 0 for v in vals[1:]):
        return sorted(group, key=lambda e: e[1])
    def cmp(i, j):
        c = vals[i].compare(vals[j])
        return c if c else group[i][1] - group[j][1]

    order = sorted(range(len(group)), key=functools.cmp_to_key(cmp))
    return [group[i] for i in order]


def _regroup(ctx: _Ctx, ta: SurdValue, events: Iterable) -> Iterator:
    """Pass events through, exactly re-sorting runs that share an integer key."""
    buf: list = []
    for ev in events:
        if buf and ev[0] != buf[0][0]:
            yield from _exact_sorted(ctx, ta, buf)
            buf = []
        buf.append(ev)
    yield from _exact_sorted(ctx, ta, buf)


def _k_events(ctx: _Ctx, k: int, ta, tb, key_a: int):
    """Start stream and end stream for column k (each in increasing position)."""
    ma, mb, mmax, where = _m_bounds(ctx, k, ta, tb)
    ma = max(ma, 0)

    def starts():
        for m in range(1, min(ma, mmax) + 1):
            yield (key_a, START, k, m, 0)
        for m in range(ma + 1, mmax + 1):
            yield (ctx.key(k, m, -1), START, k, m, -1)

    def ends():
        if where == 1:
            return
        for m in range(mmax, max(mb, 0), -1):
            yield (ctx.key(k, m, 1), END, k, m, 1)

    return starts(), ends()


def _stream_events(ctx: _Ctx, ta: SurdValue, tb: SurdValue):
    key_a = _key_of(ta)
    streams = []
    k = 1
    while True:
        if _m_bounds(ctx, k, ta, tb)[2] < 1:
            break
        streams.extend(_k_events(ctx, k, ta, tb, key_a))
        k += 1
    return _regroup(ctx, ta, heapq.merge(*streams, key=lambda e: (e[0], e[1])))


def _key_of(t: SurdValue) -> int:
    return surd_floor(t * (1 << KEY_BITS))


# -- run extraction ------------------------------------------------------------


@dataclass
class SweepResult:
    """Outcome of one sweep over a closed t-range.

    ``runs`` are closed sets where the count equals ``max_count`` (or is at
    least ``level``), as (lo, hi) event descriptors: ``("a",)``/``("b",)``
    for the range ends, otherwise (k, m, side).
    """

    max_count: int
    runs: list
    level: int | None = None
    events: int = 0


def _scan(events: Iterable, baseline: int, level: int | None) -> SweepResult:
    """Runs at the maximum (level None) or with count >= level."""
    cur = baseline
    n_ev = 0
    if level is None:
        best = baseline
        runs: list = []
        open_lo = ("a",) if baseline == best else None
        for ev in events:
            n_ev += 1
            if ev[1] == START:
                cur += 1
                if cur > best:
                    best = cur
                    runs = []
                    open_lo = _desc(ev)
                elif cur == best:
                    open_lo = _desc(ev)
            else:
                if cur == best and open_lo is not None:
                    runs.append((open_lo, _desc(ev)))
                    open_lo = None
                cur -= 1
        if open_lo is not None:
            runs.append((open_lo, ("b",)))
        return SweepResult(best, runs, None, n_ev)
    runs = []
    best = baseline
    open_lo = ("a",) if baseline >= level else None
    for ev in events:
        n_ev += 1
        if ev[1] == START:
            cur += 1
            best = max(best, cur)
            if cur == level:
                open_lo = _desc(ev)
        else:
            if cur == level and open_lo is not None:
                runs.append((open_lo, _desc(ev)))
                open_lo = None
            cur -= 1
    if open_lo is not None:
        runs.append((open_lo, ("b",)))
    return SweepResult(best, runs, level, n_ev)


def _desc(ev):
    return ("a",) if ev[4] == 0 else (ev[2], ev[3], ev[4])


def _stream_sweep(alpha: AreaParam, sa, sb, level=None) -> SweepResult:
    ctx = _Ctx(alpha)
    ta, tb = ctx.t_of_s(sa), ctx.t_of_s(sb)
    # starts clamped to ta are events too, so the sweep begins from zero
    return _scan(_stream_events(ctx, ta, tb), 0, level)


# -- numpy window engine -------------------------------------------------------


def _floor_V_many(ctx: _Ctx, s: Fraction, ks: np.ndarray) -> np.ndarray:
    """Exact floor(alpha*s - k*s^2) for an array of k, s rational."""
    X = ctx.alpha.as_surd() * s
    s2 = s * s
    num, den = s2.numerator, s2.denominator
    F = surd_floor(X * den)  # floor(X * den)
    if abs(F) < 2**62 and num * int(ks[-1] if len(ks) else 0) < 2**62:
        return (F - ks * num) // den
    return np.array([(F - int(k) * num) // den for k in ks], dtype=object)


def _window_arrays(alpha: AreaParam, sa: Fraction, sb: Fraction):
    """Baseline count at sa and the endpoint events strictly inside (sa, sb]."""
    ctx = _Ctx(alpha)
    af = float(alpha)
    # columns that can reach height 1 somewhere on [sa, sb]
    kcap = int((af * float(sb) - 1) / float(sa) ** 2) + 2
    kcap = max(kcap, 1)
    ks = np.arange(1, kcap + 1, dtype=np.int64)
    ma = _floor_V_many(ctx, sa, ks).astype(np.int64)
    mb = _floor_V_many(ctx, sb, ks).astype(np.int64)
    # vertex position alpha/(2k) against [sa, sb]; exact on near ties
    sv = af / (2.0 * ks)
    left = sv < float(sa)
    right = sv > float(sb)
    near = np.nonzero((np.abs(sv - float(sa)) <= 1e-9 * float(sa)) | (np.abs(sv - float(sb)) <= 1e-9 * float(sb)))[0]
    for i in near:
        k = int(ks[i])
        # alpha/(2k) vs s: compare alpha^2 with 4 k^2 s^2
        left[i] = ctx.sq < 4 * k * k * sa * sa
        right[i] = ctx.sq > 4 * k * k * sb * sb
    Aq = ctx.sq.numerator // ctx.sq.denominator
    vmax = Aq // (4 * ks)  # floor(alpha^2 / 4k)
    mmax = np.where(left, ma, np.where(right, mb, vmax))
    ma0 = np.maximum(ma, 0)
    mb0 = np.maximum(mb, 0)
    # starts: m in (ma, mmax] when the vertex is not left of the range
    st_lo = ma0
    st_hi = np.where(left, ma0, np.maximum(mmax, ma0))
    # ends: m in (mb, mmax] when the vertex is not right of the range
    en_lo = mb0
    en_hi = np.where(right, mb0, np.maximum(mmax, mb0))
    ks_s, ms_s = _expand(ks, st_lo, st_hi)
    ks_e, ms_e = _expand(ks, en_lo, en_hi)
    Af = float(ctx.sq - Aq)

    def sqrt_disc(kk, mm):
        d = (Aq - 4 * kk * mm).astype(np.float64) + Af
        return np.sqrt(np.maximum(d, 0.0))

    pos_s = 2.0 * ms_s / (af + sqrt_disc(ks_s, ms_s))
    pos_e = (af + sqrt_disc(ks_e, ms_e)) / (2.0 * ks_e)
    pos = np.concatenate([pos_s, pos_e])
    typ = np.concatenate([np.zeros(len(pos_s), np.int8), np.ones(len(pos_e), np.int8)])
    kk = np.concatenate([ks_s, ks_e])
    mm = np.concatenate([ms_s, ms_e])
    t_a = ctx.t_of_s(sa)
    baseline = count_scaled(alpha, t_a)
    return ctx, baseline, pos, typ, kk, mm


def _expand(ks, lo, hi):
    """Flatten the ranges m in (lo_i, hi_i] into parallel (k, m) arrays."""
    cnt = np.maximum(hi - lo, 0)
    total = int(cnt.sum())
    if total == 0:
        return np.zeros(0, np.int64), np.zeros(0, np.int64)
    kk = np.repeat(ks, cnt)
    starts = np.repeat(lo + 1 - np.concatenate([[0], np.cumsum(cnt)[:-1]]), cnt)
    mm = starts + np.arange(total)
    return kk, mm.astype(np.int64)


def _window_order(ctx: _Ctx, ta: SurdValue, pos, typ, kk, mm) -> np.ndarray:
    """Permutation putting events in exact order."""
    order = np.lexsort((typ, pos))
    if len(order) < 2:
        return order
    p = pos[order]
    close = np.diff(p) <= CLUSTER_REL * np.abs(p[1:])
    if not close.any():
        return order
    order = order.copy()
    idx = np.nonzero(close)[0]
    # group consecutive close pairs into clusters [i, j]
    i = 0
    while i < len(idx):
        a = idx[i]
        b = a + 1
        while i + 1 < len(idx) and idx[i + 1] == b:
            i += 1
            b += 1
        members = order[a : b + 1]
        evs = [
            (0, int(typ[e]), int(kk[e]), int(mm[e]), -1 if typ[e] == START else 1, int(e)) for e in members
        ]
        resolved = _exact_sorted(ctx, ta, evs)
        order[a : b + 1] = [e[5] for e in resolved]
        i += 1
    return order


def _window_sweep(alpha: AreaParam, sa: Fraction, sb: Fraction, level=None) -> SweepResult:
    ctx, baseline, pos, typ, kk, mm = _window_arrays(alpha, sa, sb)
    ta = ctx.t_of_s(sa)
    order = _window_order(ctx, ta, pos, typ, kk, mm)
    typ_o = typ[order]
    delta = np.where(typ_o == START, 1, -1).astype(np.int64)
    counts = baseline + np.cumsum(delta)
    n = len(order)
    if level is None:
        best = int(max(baseline, counts[typ_o == START].max() if n and (typ_o == START).any() else baseline))
        target = best
    else:
        best = int(max(baseline, counts.max() if n else baseline))
        target = level
    before = np.concatenate([[baseline], counts[:-1]]) if n else np.zeros(0, np.int64)
    # a run opens where the count rises to target and closes where it falls below
    opens = np.nonzero((typ_o == START) & (counts == target) & (before == target - 1))[0]
    closes = np.nonzero((typ_o == END) & (before == target) & (counts == target - 1))[0]
    runs = []

    def desc(i):
        e = order[i]
        return (int(kk[e]), int(mm[e]), -1 if typ[e] == START else 1)

    lo_list = ([("a",)] if baseline >= target and (level is not None or baseline == best) else []) + [desc(i) for i in opens]
    hi_list = [desc(i) for i in closes]
    if len(hi_list) < len(lo_list):
        hi_list.append(("b",))
    runs = list(zip(lo_list, hi_list))
    if level is None and best != target:
        runs = []
    return SweepResult(best, runs, level, n)


def window_max(alpha, s_lo, s_hi) -> tuple[int, float]:
    """Maximum count over s in [s_lo, s_hi] (rational ends) and a maximizing beta."""
    alpha = AreaParam.of(alpha)
    res = _window_sweep(alpha, Fraction(s_lo), Fraction(s_hi))
    ctx = _Ctx(alpha)
    lo = res.runs[0][0] if res.runs else ("a",)
    t = _resolve(ctx, ctx.t_of_s(Fraction(s_lo)), ctx.t_of_s(Fraction(s_hi)), lo)
    return res.max_count, float(_beta_of_t(ctx, t))


# -- chunking and reconciliation ----------------------------------------------


def _resolve(ctx: _Ctx, ta, tb, d) -> SurdValue:
    if d[0] == "a":
        return ta
    if d[0] == "b":
        return tb
    return ctx.root(*d)


def _event_density(alpha_f: float, s: np.ndarray) -> np.ndarray:
    """Approximate endpoint events per unit s: sum_k |alpha - 2 k s| over live k."""
    out = np.empty(len(s))
    for i, x in enumerate(s):
        K = max(int((alpha_f * x - 1) / (x * x)), 0)
        if K == 0:
            out[i] = 0.0
            continue
        ks = np.arange(1, K + 1)
        out[i] = np.abs(alpha_f - 2 * ks * x).sum()
    return out


def _chunk_cuts(alpha: AreaParam, sa: Fraction, sb: Fraction, target: int, min_chunks: int = 1) -> list[Fraction]:
    """Rational cut points splitting [sa, sb] into chunks of ~target events."""
    af = float(alpha)
    grid = np.linspace(float(sa), float(sb), 257)
    dens = _event_density(af, grid)
    cum = np.concatenate([[0.0], np.cumsum((dens[1:] + dens[:-1]) / 2 * np.diff(grid))])
    total = cum[-1]
    n = max(min_chunks, int(math.ceil(total / max(target, 1))), 1)
    cuts = [sa]
    for j in range(1, n):
        x = float(np.interp(total * j / n, cum, grid))
        c = Fraction(round(x * 2**30), 2**30)
        if cuts[-1] < c < sb:
            cuts.append(c)
    cuts.append(sb)
    return cuts


def _merge_runs(pieces: list[tuple[SweepResult, SurdValue, SurdValue]], ctx: _Ctx, level=None):
    """Combine chunk results; returns (max, list of exact (t_lo, t_hi))."""
    best = max(p[0].max_count for p in pieces)
    runs = []
    for res, ta, tb in pieces:
        if level is None and res.max_count != best:
            continue
        for lo, hi in res.runs:
            runs.append((_resolve(ctx, ta, tb, lo), _resolve(ctx, ta, tb, hi)))
    merged: list = []
    for lo, hi in runs:
        if merged and merged[-1][1].compare(lo) == 0:
            merged[-1] = (merged[-1][0], hi)
        else:
            merged.append((lo, hi))
    return best, merged


def _chunk_job(args):
    alpha, engine, lo, hi, level = args
    if engine == "stream":
        return _stream_sweep(alpha, lo, hi, level)
    return _window_sweep(alpha, lo, hi, level)


def sweep_runs(
    alpha,
    s_range=None,
    engine: str = "auto",
    level: int | None = None,
    workers: int = 1,
    budget: int | None = None,
    chunk_events: int = 2_000_000,
):
    """Exact sweep; returns (max_count, runs as exact t-intervals, engine used).

    With ``level`` the runs are the maximal closed sets with count >= level.
    """
    alpha = AreaParam.of(alpha)
    sa, sb = _normalize_range(s_range)
    if engine == "auto":
        engine = "stream" if projected_intervals(alpha, (sa, sb)) <= 20_000 else "window"
    if engine == "stream" and budget is not None:
        proj = projected_intervals(alpha, (sa, sb))
        if proj > budget:
            raise BudgetExceeded(f"exact sweep needs {proj} intervals, budget is {budget}")
    ctx = _Ctx(alpha)
    if engine == "window":
        if not (sa.is_rational and sb.is_rational):
            raise ValueError("window engine needs rational s_range ends")
        cuts = _chunk_cuts(alpha, sa.as_fraction(), sb.as_fraction(), chunk_events, workers)
    elif engine == "stream":
        if workers > 1 and sa.is_rational and sb.is_rational:
            a, b = sa.as_fraction(), sb.as_fraction()
            cuts = [a + (b - a) * j / workers for j in range(workers + 1)]
        else:
            cuts = [sa, sb]
    else:
        raise ValueError(f"unknown engine {engine!r}")
    jobs = [(alpha, engine, lo, hi, level) for lo, hi in zip(cuts, cuts[1:])]
    results = pmap(_chunk_job, jobs, workers)
    pieces = [(res, ctx.t_of_s(lo), ctx.t_of_s(hi)) for res, (lo, hi) in zip(results, zip(cuts, cuts[1:]))]
    best, runs = _merge_runs(pieces, ctx, level)
    return best, runs, engine


# -- canonical slopes ----------------------------------------------------------


def simplest_rational(lo, hi, max_steps: int = 200) -> Fraction | None:
    """Minimal-denominator rational in the closed interval [lo, hi] (lo > 0).

    Integer ties go to the candidate nearest 1.  A degenerate irrational
    interval has no rational point and gives None.
    """
    lo, hi = as_surd(lo), as_surd(hi)
    if lo.compare(hi) > 0:
        raise ValueError("empty interval")
    if lo.compare(hi) == 0:
        return lo.as_fraction() if lo.is_rational else None
    prefix: list[int] = []
    for _ in range(max_steps):
        c = math.ceil(lo)
        if hi.compare(c) >= 0:
            if c <= 0:
                c = 1 if hi.compare(1) >= 0 else 0
            x = Fraction(c)
            for a in reversed(prefix):
                x = a + 1 / x
            return x
        a = math.floor(lo)
        prefix.append(a)
        lo, hi = (hi - a).reciprocal(), (lo - a).reciprocal()
    raise RuntimeError("continued fraction search did not terminate")


# -- reports ---------------------------------------------------------------------


@dataclass
class ArgmaxReport:
    alpha: AreaParam
    s_range: tuple
    max_count: int
    maximizing_sets: list  # (beta_lo, beta_hi) exact
    canonical_slopes: list  # Slope or None per set
    ties: bool
    engine: str = "stream"

    @property
    def max_deficit(self) -> SurdValue:
        return deficit_exact(self.alpha, self.max_count)

    def to_json(self) -> dict:
        return {
            "alpha": self.alpha.text(),
            "alpha_float": float(self.alpha),
            "s_range": [str(x) for x in self.s_range],
            "max_count": self.max_count,
            "max_deficit": float(self.max_deficit),
            "maximizing_sets": [
                {
                    "beta_lo": lo.to_text(),
                    "beta_hi": hi.to_text(),
                    "beta_lo_float": float(lo),
                    "beta_hi_float": float(hi),
                    "degenerate": lo.compare(hi) == 0,
                }
                for lo, hi in self.maximizing_sets
            ],
            "canonical_slopes": [str(s) if s is not None else None for s in self.canonical_slopes],
            "ties": self.ties,
            "engine": self.engine,
            "canonical_rule": "minimal denominator in the closed set; integer ties nearest 1",
        }


def _to_slope(x: Fraction | None) -> Slope | None:
    if x is None or x <= 0:
        return None
    return Slope(x.numerator, x.denominator)


def argmax_slope(
    alpha,
    s_range=None,
    engine: str = "auto",
    workers: int = 1,
    budget: int | None = None,
) -> ArgmaxReport:
    """All slopes in s_range maximizing N_beta(alpha), as exact closed beta-sets."""
    alpha = AreaParam.of(alpha)
    sa, sb = _normalize_range(s_range)
    best, runs, used = sweep_runs(alpha, (sa, sb), engine, None, workers, budget)
    ctx = _Ctx(alpha)
    sets = [(_beta_of_t(ctx, lo), _beta_of_t(ctx, hi)) for lo, hi in runs]
    canon = [_to_slope(simplest_rational(lo, hi)) for lo, hi in sets]
    return ArgmaxReport(alpha, (sa, sb), best, sets, canon, len(sets) > 1, used)


@dataclass
class OracleReport:
    max_count: int
    grid_max: int
    endpoint_max: int
    evaluations: int


def argmax_bruteforce_oracle(alpha, grid_size: int, s_range=None, endpoints: bool = True) -> OracleReport:
    """Direct counts on a uniform s-grid plus every exact interval endpoint."""
    if grid_size < 1:
        raise ValueError("grid_size must be >= 1")
    alpha = AreaParam.of(alpha)
    ctx = _Ctx(alpha)
    sa, sb = _normalize_range(s_range)
    ta, tb = ctx.t_of_s(sa), ctx.t_of_s(sb)
    evals = 0
    gmax = 0
    if sa.is_rational and sb.is_rational:
        a, b = sa.as_fraction(), sb.as_fraction()
        for i in range(grid_size + 1):
            s = a + (b - a) * Fraction(i, grid_size)
            gmax = max(gmax, count_scaled(alpha, ctx.t_of_s(s)))
            evals += 1
    else:
        for t in (ta, tb):
            gmax = max(gmax, count_scaled(alpha, t))
            evals += 1
    emax = 0
    if endpoints:
        for iv in enumerate_intervals(alpha, (sa, sb)):
            for t in (iv.t_lo, iv.t_hi):
                if t.compare(ta) >= 0 and t.compare(tb) <= 0:
                    emax = max(emax, count_scaled(alpha, t))
                    evals += 1
    return OracleReport(max(gmax, emax), gmax, emax, evals)


def _argmax_job(args):
    alpha, s_range, engine, budget = args
    return argmax_slope(alpha, s_range, engine, 1, budget)


@dataclass
class LimitScan:
    reports: list
    frequency: Counter
    in_lambda: dict


def limit_set_scan(alphas: Sequence, s_range=None, workers: int = 1, engine: str = "auto", budget=None) -> LimitScan:
    """Argmax reports along a sequence of areas and a tally of canonical slopes."""
    from .lambdaset import lambda_membership

    alphas = [AreaParam.of(a) for a in alphas]
    for a, b in zip(alphas, alphas[1:]):
        if not a < b:
            raise ValueError("alphas must be increasing")
    reports = pmap(_argmax_job, [(a, s_range, engine, budget) for a in alphas], workers)
    freq: Counter = Counter()
    for rep in reports:
        for s in rep.canonical_slopes:
            if s is not None:
                freq[s] += 1
    return LimitScan(reports, freq, {s: lambda_membership(s) for s in freq})


@dataclass(frozen=True)
class GoodSlopeQuery:
    alpha: AreaParam
    gamma: float
    eta: float

    def __post_init__(self):
        object.__setattr__(self, "alpha", AreaParam.of(self.alpha))
        if not 0 < self.eta < self.gamma:
            raise ValueError("need 0 < eta < gamma")


def good_threshold(alpha: AreaParam, gamma) -> int:
    """Smallest integer count N with N > alpha^2/2 - alpha + gamma*alpha/2."""
    g = as_surd(gamma) if not isinstance(gamma, float) else SurdValue.rational(Fraction(gamma))
    bound = SurdValue.rational(alpha.squared() / 2) + alpha.as_surd() * ((g - 2) / 2)
    return surd_floor(bound) + 1


def good_slope_analysis(query: GoodSlopeQuery, s_range=None, engine: str = "auto") -> list[dict]:
    """Maximal beta-sets where beta is gamma-good, with their nearest small-denominator rational."""
    from .hull import boundary_density

    alpha = query.alpha
    level = good_threshold(alpha, query.gamma)
    best, runs, _ = sweep_runs(alpha, s_range, engine, level)
    if best < level:
        return []
    ctx = _Ctx(alpha)
    qmax = math.ceil(1 / query.eta) - 1
    out = []
    af = float(alpha)
    for lo, hi in runs:
        blo, bhi = _beta_of_t(ctx, lo), _beta_of_t(ctx, hi)
        rep = simplest_rational(blo, bhi)
        mid = (float(blo) + float(bhi)) / 2
        best_pq = None
        for q in range(1, max(qmax, 1) + 1):
            p = max(1, round(mid * q))
            d = abs(mid - p / q)
            if best_pq is None or d < best_pq[0] - 1e-15:
                best_pq = (d, Fraction(p, q))
        dens = boundary_density(alpha, _to_slope(rep)) if rep is not None else None
        out.append(
            {
                "beta_lo": blo,
                "beta_hi": bhi,
                "representative": rep,
                "nearest": best_pq[1],
                "distance": best_pq[0],
                "scaled_distance": best_pq[0] * af,
                "boundary_density": dens,
            }
        )
    return out
