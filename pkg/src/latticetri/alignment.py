"""Aligned fractional parts, bad areas, and the integer-area comparison density.

A slope p/q does badly at alpha when {alpha*sqrt(pq)} is close to 1, since the
linear coefficient is (1 - 2{alpha sqrt(pq)} - p - q)/(2 sqrt(pq)).  Taking
alpha = k*sqrt(anchor) and scanning k pushes all small-denominator slopes
into that regime at once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import partial
from typing import Sequence

import numpy as np

from ._parallel import pmap
from .cache import ResultCache
from .counting import AreaParam, Slope, count_lattice_points, count_positive_solutions, deficit_exact
from .exactnum import SurdValue, as_surd, squarefree_split, surd_floor
from .optimizer import BudgetExceeded, projected_intervals, sweep_runs

__all__ = [
    "AlignmentQuery",
    "AlignmentResult",
    "BadAreaReport",
    "DensityReport",
    "align_multiples",
    "align_radicals",
    "certify_fracs",
    "candidate_slopes",
    "evaluate_area",
    "bad_area_search",
    "comparison_density",
    "predicted_density",
]


# -- multiples of reals ----------------------------------------------------------


@dataclass
class MultiplesResult:
    found: bool
    m: int | None
    b: tuple | None
    max_error: float
    near_miss: tuple | None = None  # (m, b, error) of the best try when not found


def align_multiples(values: Sequence, epsilon, k_max: int = 10**6) -> MultiplesResult:
    """First m <= k_max with integers b_i making every |a_i b_i - m| <= epsilon.

    Exact values (rationals, surds, grammar strings) are checked exactly;
    floats in double precision.
    """
    exact = not any(isinstance(v, float) for v in values)
    vals = [as_surd(v) for v in values] if exact else [float(v) for v in values]
    if any((v.sign() if exact else (1 if v > 0 else -1)) <= 0 for v in vals):
        raise ValueError("values must be positive")
    eps = Fraction(epsilon) if exact else float(epsilon)
    if eps < 0:
        raise ValueError("epsilon must be nonnegative")
    fvals = [float(v) for v in vals]
    best = None
    for m in range(1, k_max + 1):
        bs = tuple(max(1, round(m / a)) for a in fvals)
        ok = True
        worst = 0.0
        for a, fa, b in zip(vals, fvals, bs):
            err = abs(fa * b - m)
            worst = max(worst, err)
            if exact:
                diff = a * b - m
                if abs(diff).compare(eps) > 0:
                    ok = False
            elif err > eps:
                ok = False
        if ok:
            return MultiplesResult(True, m, bs, worst)
        if best is None or worst < best[2]:
            best = (m, bs, worst)
    return MultiplesResult(False, None, None, best[2] if best else math.inf, best)


# -- radical alignment -------------------------------------------------------------


@dataclass(frozen=True)
class AlignmentQuery:
    radicands: tuple
    anchor: int
    epsilon: Fraction
    k_max: int
    include_anchor: bool = False

    def __post_init__(self):
        rads = tuple(int(x) for x in self.radicands)
        object.__setattr__(self, "radicands", rads)
        object.__setattr__(self, "epsilon", Fraction(self.epsilon))
        if not 0 < self.epsilon < 1:
            raise ValueError("epsilon must lie in (0, 1)")
        if self.k_max < 1:
            raise ValueError("k_max must be >= 1")
        if len(set(rads)) != len(rads):
            raise ValueError("radicands must be distinct")
        for n in rads:
            if n < 2 or squarefree_split(n)[0] != 1:
                raise ValueError(f"radicand {n} must be squarefree and > 1")
        if self.anchor < 2 or squarefree_split(self.anchor)[1] == 1:
            raise ValueError("anchor must not be a perfect square")
        # every sqrt(anchor * n_i) must be irrational and distinct, which is what
        # a prime anchor coprime to the radicands guarantees
        cores = [squarefree_split(self.anchor * n)[1] for n in rads]
        if any(c == 1 for c in cores) or len(set(cores)) != len(cores):
            raise ValueError("anchor makes two targets rationally dependent")

    def targets(self) -> list[tuple[int, int]]:
        """(multiplier, radicand) pairs whose k-multiples are aligned."""
        out = [(1, self.anchor * n) for n in self.radicands]
        if self.include_anchor:
            out.insert(0, (1, self.anchor))
        return out

    def to_dict(self) -> dict:
        return {
            "radicands": list(self.radicands),
            "anchor": self.anchor,
            "epsilon": str(self.epsilon),
            "k_max": self.k_max,
            "include_anchor": self.include_anchor,
        }


@dataclass(frozen=True)
class AlignmentResult:
    k: int
    alpha: AreaParam
    fracs: tuple


def _frac_exact(k: int, mult: int, N: int) -> SurdValue:
    """{k * mult * sqrt(N)} exactly."""
    x = SurdValue(k * mult, 0, 1, N)
    return x - surd_floor(x)


def certify_fracs(k: int, targets, epsilon: Fraction) -> tuple | None:
    """Exact fractional parts if all exceed 1 - epsilon, else None."""
    out = []
    lo = 1 - Fraction(epsilon)
    for mult, N in targets:
        f = _frac_exact(k, mult, N)
        if f.compare(lo) <= 0:
            return None
        out.append(f)
    return tuple(out)


# double-precision fractional parts are off by at most ~k * |value| * 2**-51;
# the float filter is widened by this much so it never drops a true hit
def _float_margin(k_hi: int, targets) -> float:
    top = max((m * math.sqrt(N) for m, N in targets), default=0.0)
    return 8.0 * k_hi * top * 2.0**-52 + 1e-12


def _scan_block(args) -> list[int]:
    k0, k1, targets, eps = args
    ks = np.arange(k0, k1, dtype=np.float64)
    margin = _float_margin(k1, targets)
    keep = np.ones(len(ks), dtype=bool)
    thresh = 1.0 - float(eps) - margin
    for mult, N in targets:
        x = ks * (mult * math.sqrt(N))
        f = x - np.floor(x)
        keep &= (f > thresh) | (f < margin)
        if not keep.any():
            return []
    cand = (np.nonzero(keep)[0] + k0).tolist()
    return [k for k in cand if certify_fracs(k, targets, eps) is not None]


def iter_aligned(targets, epsilon, k_max: int, k_min: int = 1, workers: int = 1, block: int = 1_000_000, cache: ResultCache | None = None):
    """Yield, in increasing order, every k in [k_min, k_max] with all {k m_j sqrt(N_j)} in (1 - eps, 1).

    Blocks of k are scanned lazily (``workers`` at a time); with a cache each
    block's hits are stored and re-certified when read back.
    """
    eps = Fraction(epsilon)
    targets = [tuple(t) for t in targets]
    starts = list(range(k_min, k_max + 1, block))
    step = max(workers, 1)
    for i in range(0, len(starts), step):
        group = [(a, min(a + block, k_max + 1), targets, eps) for a in starts[i : i + step]]
        found: list = [None] * len(group)
        todo = []
        for j, g in enumerate(group):
            if cache is not None:
                q = {"kind": "aligned-block", "targets": [list(t) for t in targets], "epsilon": str(eps), "k0": g[0], "k1": g[1]}
                stored = cache.get(q)
                if stored is not None and all(certify_fracs(k, targets, eps) is not None for k in stored):
                    found[j] = stored
                    continue
            todo.append(j)
        for j, part in zip(todo, pmap(_scan_block, [group[j] for j in todo], workers)):
            found[j] = part
            if cache is not None:
                g = group[j]
                q = {"kind": "aligned-block", "targets": [list(t) for t in targets], "epsilon": str(eps), "k0": g[0], "k1": g[1]}
                cache.put(q, part)
        for part in found:
            yield from part


def scan_aligned(targets, epsilon, k_max: int, k_min: int = 1, workers: int = 1, block: int = 1_000_000, limit=None, cache=None) -> list[int]:
    """List form of :func:`iter_aligned`, optionally stopping after ``limit`` hits."""
    out = []
    for k in iter_aligned(targets, epsilon, k_max, k_min, workers, block, cache):
        out.append(k)
        if limit is not None and len(out) >= limit:
            break
    return out


def align_radicals(query: AlignmentQuery, workers: int = 1, cache: ResultCache | None = None, limit=None) -> list[AlignmentResult]:
    """All k <= k_max with {k sqrt(anchor * n_i)} in (1 - eps, 1), each certified exactly.

    With a cache, stored k values are re-certified before being returned.
    """
    targets = query.targets()
    ks = scan_aligned(targets, query.epsilon, query.k_max, workers=workers, limit=limit, cache=cache)
    out = []
    for k in ks:
        fr = certify_fracs(k, targets, query.epsilon)
        out.append(AlignmentResult(k, AreaParam(Fraction(k), query.anchor), tuple(float(f) for f in fr)))
    return out


# -- evaluating an area --------------------------------------------------------------


def candidate_slopes(q_max: int, lo=Fraction(1, 3), hi=Fraction(3)) -> list[Slope]:
    """Reduced p/q in [lo, hi] with q <= q_max, sorted by value."""
    out = []
    for q in range(1, q_max + 1):
        for p in range(math.ceil(lo * q), math.floor(hi * q) + 1):
            if p >= 1 and math.gcd(p, q) == 1:
                out.append(Slope(p, q))
    out.sort(key=lambda s: s.value)
    return out


@dataclass
class BadAreaReport:
    alpha: AreaParam
    candidate_sups: list  # (Slope, deficit float)
    neighborhood_sup: float | None
    overall_sup: float
    method: str
    overall_exact: SurdValue | None = None
    best_count: int = 0
    best_beta: float | None = None
    q_max: int = 0
    window_c: float = 0.0
    events: int = 0
    aborted: bool = False

    def to_json(self) -> dict:
        best = max(self.candidate_sups, key=lambda t: t[1]) if self.candidate_sups else None
        return {
            "alpha": self.alpha.text(),
            "alpha_float": float(self.alpha),
            "method": self.method,
            "q_max": self.q_max,
            "window_c": self.window_c,
            "overall_sup": self.overall_sup,
            "overall_sup_exact": self.overall_exact.to_text() if self.overall_exact is not None else None,
            "best_count": self.best_count,
            "best_beta": self.best_beta,
            "neighborhood_sup": self.neighborhood_sup,
            "best_candidate": {"slope": str(best[0]), "deficit": best[1]} if best else None,
            "n_candidates": len(self.candidate_sups),
            "aborted": self.aborted,
        }


def _candidate_counts(alpha: AreaParam, slopes: Sequence[Slope]) -> list[int]:
    num, den = alpha.r.numerator, alpha.r.denominator
    out = []
    for s in slopes:
        L = math.isqrt(num * num * alpha.n * s.p * s.q) // den
        out.append(count_positive_solutions(s.p, s.q, L))
    return out


def _s_bound(beta: Fraction, up: bool, bits: int = 40) -> Fraction:
    """Dyadic rational just below (or above) sqrt(beta)."""
    scale = 1 << bits
    x = beta * scale * scale
    r = math.isqrt(x.numerator // x.denominator)
    if up:
        r += 1
    return Fraction(r, scale)


def _windows(alpha: AreaParam, slopes, c, lo=Fraction(1, 3), hi=Fraction(3)) -> list[tuple[Fraction, Fraction]]:
    """Union of s-ranges covering |beta - p/q| <= c/alpha, clipped to [lo, hi]."""
    width = Fraction(c) / Fraction(math.floor(float(alpha) * 2**20), 2**20)
    pieces = []
    for s in slopes:
        b_lo = max(lo, s.value - width)
        b_hi = min(hi, s.value + width)
        pieces.append((_s_bound(b_lo, False), _s_bound(b_hi, True)))
    pieces.sort()
    merged: list = []
    for a, b in pieces:
        if merged and a <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], b))
        else:
            merged.append((a, b))
    return merged


def evaluate_area(
    alpha,
    q_max: int = 10,
    mode: str = "candidate-scan",
    c=50,
    workers: int = 1,
    budget: int | None = 5_000_000,
    local: bool = True,
    abort_above=None,
) -> BadAreaReport:
    """sup over slopes of the deficit at ``alpha``.

    ``candidate-scan`` counts every p/q in [1/3, 3] with q <= q_max and sweeps
    beta within c/alpha of each of them; ``exact-sweep`` runs the streaming
    sweep over beta in [1/4, 4] and refuses when the projected interval count
    exceeds ``budget``.

    With ``abort_above`` set, the local windows are swept nearest beta = 1
    first and evaluation stops (``aborted=True``) as soon as some deficit
    exceeds that level; ``overall_sup`` is then only a lower bound.
    """
    alpha = AreaParam.of(alpha)
    if q_max < 1:
        raise ValueError("q_max must be >= 1")
    slopes = candidate_slopes(q_max)
    counts = _candidate_counts(alpha, slopes)
    cand = [(s, float(deficit_exact(alpha, n))) for s, n in zip(slopes, counts)]
    i_best = max(range(len(counts)), key=lambda i: counts[i])
    best_count = counts[i_best]
    best_beta = float(slopes[i_best].value)
    neigh = None
    events = 0
    aborted = False
    if abort_above is not None and float(deficit_exact(alpha, best_count)) > abort_above:
        aborted = True
    elif mode == "candidate-scan":
        if local:
            nb = -1
            wins = _windows(alpha, slopes, c)
            if abort_above is not None:
                wins.sort(key=lambda w: abs(math.log(float(w[0] + w[1]) / 2)))
            for sa, sb in wins:
                m, runs, _ = sweep_runs(alpha, (sa, sb), "window", workers=workers)
                if m > nb:
                    nb = m
                    if m > best_count:
                        best_count = m
                        best_beta = float(runs[0][0]) ** 2 * alpha.n if runs else best_beta
                    if abort_above is not None and float(deficit_exact(alpha, m)) > abort_above:
                        aborted = True
                        break
            neigh = float(deficit_exact(alpha, nb))
    elif mode == "exact-sweep":
        rng = (Fraction(1, 2), Fraction(2))
        proj = projected_intervals(alpha, rng)
        if budget is not None and proj > budget:
            raise BudgetExceeded(f"exact sweep needs {proj} intervals, budget is {budget}")
        m, runs, _ = sweep_runs(alpha, rng, "stream", workers=workers)
        events = proj
        neigh = float(deficit_exact(alpha, m))
        if m > best_count:
            best_count = m
            best_beta = float(runs[0][0]) ** 2 * alpha.n if runs else best_beta
    else:
        raise ValueError(f"unknown mode {mode!r}")
    exact = deficit_exact(alpha, best_count)
    return BadAreaReport(alpha, cand, neigh, float(exact), mode, exact, best_count, best_beta, q_max, float(c), events, aborted)


# -- bad area search -------------------------------------------------------------------


def _default_anchor(pqs, confirm) -> int:
    """Smallest prime dividing no candidate pq and equal to no squarefree core of a confirm pq.

    If anchor = core(pq) then alpha*sqrt(pq) is an integer for every k, which
    pins that slope at its best possible deficit.
    """
    cores = {squarefree_split(s.p * s.q)[1] for s in confirm}
    p = 2
    while True:
        if all(p % d for d in range(2, math.isqrt(p) + 1)) and all(n % p for n in pqs) and p not in cores:
            return p
        p += 1


@dataclass
class SearchOutcome:
    results: list  # (AreaParam, overall_sup)
    reports: list
    tried: int
    best_near_miss: tuple | None = None
    anchor: int = 0
    targets: list = field(default_factory=list)


def bad_area_search(
    gamma_target,
    q_cand: int = 3,
    anchor: int | None = None,
    epsilon=Fraction(1, 2),
    k_max: int = 10**7,
    confirm_q_max: int = 10,
    c=50,
    max_results: int = 1,
    max_tries: int = 200,
    workers: int = 1,
    cache: ResultCache | None = None,
) -> SearchOutcome:
    """Areas alpha = k*sqrt(anchor) whose best slope deficit is <= -1 + gamma_target/2.

    Candidates are the slopes in [1/3, 3] with q <= q_cand; k is scanned for
    {alpha*sqrt(pq)} in (1 - eps, 1) for all of them, then each hit is
    screened by counting at all q <= confirm_q_max and confirmed with local
    sweeps around those slopes.  Sweeps stop early once the threshold is
    exceeded, so rejected hits cost little.
    """
    gamma_target = float(gamma_target)
    if not 0 < gamma_target < 2:
        raise ValueError("gamma_target must lie in (0, 2)")
    thresh = -1 + gamma_target / 2
    slopes = candidate_slopes(q_cand)
    pqs = sorted({s.p * s.q for s in slopes})
    confirm = candidate_slopes(confirm_q_max)
    if anchor is None:
        anchor = _default_anchor(pqs, confirm)
    if squarefree_split(anchor)[1] == 1:
        raise ValueError("anchor must not be a perfect square")
    targets = []
    for pq in pqs:
        sq, core = squarefree_split(pq * anchor)
        targets.append((sq, core))
    eps = Fraction(epsilon)
    hits = iter_aligned(targets, eps, k_max, workers=workers, cache=cache)
    results = []
    reports = []
    near = None
    tried = 0
    for k in hits:
        if tried >= max_tries or len(results) >= max_results:
            break
        tried += 1
        alpha = AreaParam(Fraction(k), anchor)
        counts = _candidate_counts(alpha, confirm)
        screen = float(deficit_exact(alpha, max(counts)))
        if screen > thresh:
            if near is None or screen < near[1]:
                near = (alpha, screen)
            continue
        rep = evaluate_area(alpha, confirm_q_max, "candidate-scan", c, workers, abort_above=thresh)
        reports.append(rep)
        if not rep.aborted and rep.overall_sup <= thresh:
            results.append((alpha, rep.overall_sup))
        elif near is None or rep.overall_sup < near[1]:
            near = (alpha, rep.overall_sup)
    return SearchOutcome(results, reports, tried, near, anchor, targets)


# -- comparison density ------------------------------------------------------------------


def predicted_density(sqrt_beta) -> SurdValue:
    """(3 - s - 1/s)/2 when beta lies strictly between (7 -+ 3 sqrt 5)/2, else 0."""
    s = as_surd(sqrt_beta)
    if s.sign() <= 0:
        raise ValueError("sqrt(beta) must be positive")
    v = (3 - s - s.reciprocal()) / 2
    return v if v.sign() > 0 else SurdValue.rational(0)


@dataclass
class DensityReport:
    measured: float
    predicted: float
    measure: SurdValue  # exact measure of {alpha in [0, T]: N_1 < N_beta}
    complement: SurdValue
    T: int
    breakpoints: int


def _floor_lin(n: np.ndarray, k: np.ndarray, u: SurdValue, w: SurdValue) -> np.ndarray:
    """Exact floor(n*u - k*w) for integer arrays, u and w in one quadratic field."""
    uf, wf = float(u), float(w)
    x = n * uf - k * wf
    f = np.floor(x)
    amb = np.nonzero(np.abs(x - np.round(x)) < 1e-7 * np.maximum(1.0, np.abs(x)))[0]
    f = f.astype(np.int64)
    for i in amb:
        f[i] = surd_floor(u * int(n[i]) - w * int(k[i]))
    return f


def _ceil_lin(n, k, u, w):
    return -_floor_lin(-n, -k, u, w)


def comparison_density(sqrt_beta, T: int, workers: int = 1) -> DensityReport:
    """Exact measure of {alpha in [0, T] : N_1(alpha) < N_beta(alpha)}, divided by T.

    N_beta jumps by one at each alpha = m/s + k s (s = sqrt(beta)); on [n, n+1)
    N_1 equals n(n-1)/2, so the set there is [v, n+1) with v the
    (n(n-1)/2 + 1)-th smallest jump value.
    """
    s = as_surd(sqrt_beta)
    if s.sign() <= 0:
        raise ValueError("sqrt(beta) must be positive")
    s2 = s * s
    if s2.is_rational:
        raise ValueError("beta must be irrational")
    T = int(T)
    if T < 1:
        raise ValueError("T must be a positive integer")
    sf, s2f = float(s), float(s2)
    measure = SurdValue.rational(0)
    below = 0  # jump values < n
    nbreak = 0
    for n in range(T):
        need = n * (n - 1) // 2 + 1 if n >= 1 else 1
        kmax = int((n + 1) / sf) + 1
        ks = np.arange(1, kmax + 1, dtype=np.int64)
        nn = np.full(len(ks), n, dtype=np.int64)
        # values in [n, n+1): m in [ceil(n s - k s^2), ceil((n+1) s - k s^2) - 1], m >= 1
        m_lo = np.maximum(_ceil_lin(nn, ks, s, s2), 1)
        m_hi = _ceil_lin(nn + 1, ks, s, s2) - 1
        cnt = np.maximum(m_hi - m_lo + 1, 0)
        in_window = int(cnt.sum())
        nbreak += in_window
        if below >= need:
            measure = measure + 1
        else:
            j = need - below
            if in_window >= j:
                kk = np.repeat(ks, cnt)
                offs = np.repeat(m_lo - np.concatenate([[0], np.cumsum(cnt)[:-1]]), cnt)
                mm = offs + np.arange(in_window)
                vals = mm / sf + kk * sf
                v = _select_exact(vals, kk, mm, j, s)
                measure = measure + (n + 1 - v)
        below += in_window
    complement = SurdValue.rational(T) - measure
    pred = predicted_density(s)
    return DensityReport(float(measure) / T, float(pred), measure, complement, T, nbreak)


def _select_exact(vals: np.ndarray, kk, mm, j: int, s: SurdValue) -> SurdValue:
    """Exact j-th smallest (1-based) of m/s + k s over the listed points."""
    order = np.argsort(vals, kind="stable")
    v = vals[order]
    i = j - 1
    tol = 1e-9 * max(1.0, abs(v[i]))
    lo = i
    while lo > 0 and v[i] - v[lo - 1] <= tol:
        lo -= 1
    hi = i
    while hi + 1 < len(v) and v[hi + 1] - v[i] <= tol:
        hi += 1
    inv = s.reciprocal()

    def exact(idx):
        e = order[idx]
        return inv * int(mm[e]) + s * int(kk[e])

    if lo == hi:
        return exact(i)
    cluster = sorted((exact(t) for t in range(lo, hi + 1)), key=_CmpKey)
    return cluster[i - lo]


class _CmpKey:
    __slots__ = ("v",)

    def __init__(self, v):
        self.v = v

    def __lt__(self, other):
        return self.v.compare(other.v) < 0
