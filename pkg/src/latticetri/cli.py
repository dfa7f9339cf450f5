"""Command-line front end: ``latticetri <subcommand> [options]``.

Exit codes: 0 success, 2 usage error, 3 domain error, 4 budget exceeded.
Data files (CSV/JSON) never contain timestamps, so identical invocations
give identical bytes; timing lives only in the optional run manifest.
"""

from __future__ import annotations

import argparse
import math
import sys
import time
from fractions import Fraction

from . import __version__
from .alignment import (
    AlignmentQuery,
    align_radicals,
    bad_area_search,
    candidate_slopes,
    comparison_density,
    evaluate_area,
)
from .cache import ResultCache, default_cache_dir
from .counting import AreaParam, FloatSlope, Slope, SurdSqrt, as_slope_spec, count_with_flags, deficit_curve, deficit_exact
from .exactnum import as_surd, parse_scalar
from .hull import HullQuery, hull_under_line, pick_check, triangle_hull
from .lambdaset import box_count, dimension_fit, lambda_enumerate
from .optimizer import BudgetExceeded, argmax_slope, limit_set_scan
from .output import RunManifest, csv_text, json_text, svg_scatter, write_text
from ._parallel import default_workers

from .schemas import SCHEMA_VERSION

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_BUDGET = 0, 2, 3, 4


class UsageError(Exception):
    pass


def schema_id(cmd: str) -> str:
    return f"latticetri.{cmd}/{SCHEMA_VERSION}"


# -- argument helpers ----------------------------------------------------------


def _frac(text: str) -> Fraction:
    try:
        return parse_scalar(text).as_fraction()
    except (ValueError, ZeroDivisionError) as e:
        raise UsageError(f"expected a rational number, got {text!r}") from e


def _list(text: str, conv=str) -> list:
    return [conv(t.strip()) for t in text.split(",") if t.strip()]


def _area(text: str) -> AreaParam:
    return AreaParam.of(text)


def _s_range(args):
    lo = as_surd(args.s_lo) if args.s_lo else None
    hi = as_surd(args.s_hi) if args.s_hi else None
    if lo is None and hi is None:
        return None
    if lo is None or hi is None:
        raise UsageError("--s-lo and --s-hi go together")
    return (lo, hi)


def _beta_text(spec) -> str:
    if isinstance(spec, Slope):
        return str(spec)
    if isinstance(spec, SurdSqrt):
        return spec.beta.to_text()
    if isinstance(spec, FloatSlope):
        return repr(float(spec.beta))
    return str(spec)


class Result:
    """What a subcommand hands back to the coordinator."""

    def __init__(self, doc: dict, summary: str, table=None, svg=None):
        self.doc = doc
        self.summary = summary
        self.table = table  # (header, rows) or None
        self.svg = svg


# -- subcommands ---------------------------------------------------------------


def cmd_count(args) -> Result:
    alpha = _area(args.alpha)
    slope = as_slope_spec(args.beta)
    n, flagged = count_with_flags(alpha, slope, args.prec)
    d = deficit_exact(alpha, n)
    doc = {
        "alpha": alpha.text(),
        "alpha_float": float(alpha),
        "beta": _beta_text(slope),
        "count": n,
        "deficit": float(d),
        "deficit_exact": d.to_text(),
        "ambiguous_columns": list(flagged),
    }
    return Result(doc, str(n))


def _alpha_grid(args) -> list:
    if args.alphas:
        return [_area(a) for a in _list(args.alphas)]
    if args.start is None or args.stop is None or args.step is None:
        raise UsageError("give --alphas or all of --start/--stop/--step")
    a, b, h = _frac(args.start), _frac(args.stop), _frac(args.step)
    if h <= 0 or b < a:
        raise UsageError("need step > 0 and stop >= start")
    n = int((b - a) / h)
    return [AreaParam(a + i * h) for i in range(n + 1) if a + i * h > 0]


def cmd_deficit_curve(args) -> Result:
    slope = as_slope_spec(args.beta)
    alphas = _alpha_grid(args)
    pts = deficit_curve(slope, alphas, args.workers, args.prec)
    rows = [
        (p.alpha.text(), float(p.alpha), p.count, p.deficit, p.predicted, p.residual, len(p.warnings))
        for p in pts
    ]
    header = ["alpha", "alpha_float", "count", "deficit", "predicted_coeff", "residual", "ambiguous_columns"]
    res = [abs(p.residual) for p in pts if p.residual is not None]
    doc = {
        "beta": _beta_text(slope),
        "points": [dict(zip(header, r)) for r in rows],
        "max_abs_residual": max(res) if res else None,
    }
    summary = f"{len(pts)} points"
    if res:
        summary += f", max |residual| = {max(res)!r}"
    svg = None
    if args.svg:
        svg = svg_scatter([(float(p.alpha), p.deficit) for p in pts], title="deficit curve", xlabel="alpha", ylabel="deficit")
    return Result(doc, summary, (header, rows), svg)


def _hull_doc(h) -> dict:
    return {
        "A": str(h.A),
        "A_float": float(h.A),
        "B": h.B,
        "I": h.I,
        "D": h.D,
        "X": h.X,
        "Y": h.Y,
        "N": h.N,
        "pick_holds": h.pick_holds(),
        "segments": [{"slope": f"{s.p}/{s.q}", "n": s.n, "x_length": s.x_length} for s in h.segments],
        "vertices": [list(v) for v in h.vertices],
        "ambiguous_columns": list(h.heights_flagged),
    }


def cmd_hull(args) -> Result:
    if args.alpha is not None:
        if args.gamma is not None or args.N is not None:
            raise UsageError("--alpha excludes --gamma/--N")
        h = triangle_hull(_area(args.alpha), as_slope_spec(args.beta), args.prec)
    else:
        if args.gamma is None or args.N is None:
            raise UsageError("give --alpha, or both --gamma and --N")
        h = hull_under_line(HullQuery(as_slope_spec(args.beta), args.gamma, args.N), args.prec or 128)
    doc = _hull_doc(h)
    rows = [tuple(v) for v in h.vertices]
    return Result(doc, f"A={h.A} B={h.B} I={h.I} D={h.D}", (["x", "y"], rows))


def _vertices(text: str) -> list[tuple[int, int]]:
    out = []
    for part in text.split(";"):
        if not part.strip():
            continue
        xy = part.split(",")
        if len(xy) != 2:
            raise UsageError(f"bad vertex {part!r}; use x,y;x,y;...")
        try:
            out.append((int(xy[0]), int(xy[1])))
        except ValueError as e:
            raise UsageError(f"bad vertex {part!r}") from e
    return out


def cmd_pick(args) -> Result:
    vs = _vertices(args.vertices)
    rep = pick_check(vs)
    doc = {
        "vertices": [list(v) for v in vs],
        "A": str(rep.A),
        "B": rep.B,
        "I": rep.I,
        "identity_holds": rep.identity_holds,
        "brute_I": rep.brute_I,
        "brute_B": rep.brute_B,
    }
    return Result(doc, f"A={rep.A} B={rep.B} I={rep.I} pick={'ok' if rep.identity_holds else 'FAIL'}")


def cmd_argmax(args) -> Result:
    rep = argmax_slope(_area(args.alpha), _s_range(args), args.engine, args.workers, args.budget)
    doc = rep.to_json()
    slopes = ",".join(s if s is not None else "-" for s in doc["canonical_slopes"])
    return Result(doc, f"max_count={rep.max_count} slopes={slopes}")


def cmd_scan_argmax(args) -> Result:
    if args.alphas:
        alphas = [_area(a) for a in _list(args.alphas)]
    else:
        base = as_surd(args.base)
        alphas = [AreaParam.of(base * k) for k in range(args.k_min, args.k_max + 1)]
    scan = limit_set_scan(alphas, _s_range(args), args.workers, args.engine, args.budget)
    rows = []
    for rep in scan.reports:
        rows.append(
            (
                rep.alpha.text(),
                float(rep.alpha),
                rep.max_count,
                float(rep.max_deficit),
                ";".join(str(s) if s is not None else "-" for s in rep.canonical_slopes),
            )
        )
    header = ["alpha", "alpha_float", "max_count", "max_deficit", "canonical_slopes"]
    freq = sorted(scan.frequency.items(), key=lambda kv: (-kv[1], kv[0].value))
    doc = {
        "rows": [dict(zip(header, r)) for r in rows],
        "frequency": [{"slope": str(s), "hits": n, "in_lambda": scan.in_lambda[s]} for s, n in freq],
    }
    top = ", ".join(f"{s}:{n}" for s, n in freq[:5])
    return Result(doc, f"{len(rows)} areas; top slopes {top}", (header, rows))


def cmd_lambda(args) -> Result:
    els = lambda_enumerate(args.qmax)
    header = ["slope", "p", "q", "limsup_coeff", "limsup_coeff_float", "margin", "period_float"]
    rows = [
        (str(e.slope), e.slope.p, e.slope.q, e.limsup_coeff.to_text(), float(e.limsup_coeff), e.margin, float(e.period))
        for e in els
    ]
    doc = {"q_max": args.qmax, "members": [dict(zip(header, r)) for r in rows]}
    return Result(doc, f"{len(rows)} members with q <= {args.qmax}", (header, rows))


def cmd_dimension(args) -> Result:
    eps = [_frac(e) for e in _list(args.eps)]
    if len(eps) == 1:
        n = box_count(eps[0])
        doc = {"epsilons": [str(eps[0])], "counts": [n], "exponent": None}
        return Result(doc, f"N({eps[0]}) = {n}", (["epsilon", "epsilon_float", "boxes"], [(str(eps[0]), float(eps[0]), n)]))
    fit = dimension_fit(eps)
    rows = [(str(e), float(e), n) for e, n in zip(fit.epsilons, fit.counts)]
    doc = {
        "epsilons": [str(e) for e in fit.epsilons],
        "counts": list(fit.counts),
        "exponent": fit.exponent,
        "intercept": fit.intercept,
        "residuals": list(fit.residuals),
    }
    return Result(doc, f"box-counting exponent {fit.exponent!r}", (["epsilon", "epsilon_float", "boxes"], rows))


def _cache(args):
    if args.no_cache:
        return None
    return ResultCache(args.cache_dir) if args.cache_dir else ResultCache(default_cache_dir())


def cmd_align(args) -> Result:
    rads = [int(x) for x in _list(args.radicands)] if args.radicands else []
    q = AlignmentQuery(rads, args.anchor, _frac(args.epsilon), int(_frac(args.kmax)))
    hits = align_radicals(q, args.workers, _cache(args), args.limit)
    header = ["k", "alpha"] + [f"frac_{n}" for n in rads]
    rows = [(h.k, h.alpha.text(), *h.fracs) for h in hits]
    doc = {"query": q.to_dict(), "hits": [dict(zip(header, r)) for r in rows]}
    first = f", first k={hits[0].k}" if hits else ""
    return Result(doc, f"{len(hits)} certified hits{first}", (header, rows))


def cmd_badarea(args) -> Result:
    out = bad_area_search(
        float(_frac(args.gamma)),
        q_cand=args.qcand,
        anchor=args.anchor,
        epsilon=_frac(args.epsilon),
        k_max=int(_frac(args.kmax)),
        confirm_q_max=args.confirm_qmax,
        c=_frac(args.c),
        max_results=args.max_results,
        max_tries=args.max_tries,
        workers=args.workers,
        cache=_cache(args),
    )
    header = ["alpha", "alpha_float", "overall_sup"]
    rows = [(a.text(), float(a), sup) for a, sup in out.results]
    doc = {
        "gamma_target": float(_frac(args.gamma)),
        "threshold": -1 + float(_frac(args.gamma)) / 2,
        "anchor": out.anchor,
        "targets": [list(t) for t in out.targets],
        "tried": out.tried,
        "results": [dict(zip(header, r)) for r in rows],
        "near_miss": {"alpha": out.best_near_miss[0].text(), "sup": out.best_near_miss[1]} if out.best_near_miss else None,
        "reports": [r.to_json() for r in out.reports],
    }
    if rows:
        summary = f"found alpha={rows[0][0]} sup={rows[0][2]!r} after {out.tried} hits"
    else:
        summary = f"no bad area after {out.tried} hits"
    return Result(doc, summary, (header, rows))


def cmd_evaluate_area(args) -> Result:
    rep = evaluate_area(_area(args.alpha), args.qmax, args.mode, _frac(args.c), args.workers, args.budget)
    doc = rep.to_json()
    rows = [(str(s), float(s), d) for s, d in rep.candidate_sups]
    return Result(doc, f"overall_sup={rep.overall_sup!r} ({rep.method})", (["slope", "beta_float", "deficit"], rows))


def cmd_density(args) -> Result:
    rep = comparison_density(as_surd(args.sqrt_beta), args.T, args.workers)
    doc = {
        "sqrt_beta": as_surd(args.sqrt_beta).to_text(),
        "T": rep.T,
        "measured": rep.measured,
        "predicted": rep.predicted,
        "measure": rep.measure.to_text(),
        "complement": rep.complement.to_text(),
        "breakpoints": rep.breakpoints,
    }
    return Result(doc, f"measured={rep.measured!r} predicted={rep.predicted!r}")


def figure4_rows(alpha: AreaParam, q_max: int, grid: int, lo: Fraction, hi: Fraction) -> list:
    """(beta text, beta float, deficit, kind) for a uniform grid plus small-q rationals."""
    pts = {}
    for i in range(grid + 1):
        b = lo + (hi - lo) * Fraction(i, grid) if grid > 0 else lo
        pts.setdefault(b, "grid")
    for s in candidate_slopes(q_max, lo, hi):
        pts[s.value] = "rational"
    rows = []
    for b in sorted(pts):
        n, _ = count_with_flags(alpha, Slope(b.numerator, b.denominator))
        rows.append((str(b), float(b), float(deficit_exact(alpha, n)), pts[b]))
    return rows


def cmd_figure4(args) -> Result:
    alpha = _area(args.alpha)
    lo, hi = _frac(args.lo), _frac(args.hi)
    if not 0 < lo < hi:
        raise ValueError("need 0 < lo < hi")
    rows = figure4_rows(alpha, args.qmax, args.grid, lo, hi)
    best = max(rows, key=lambda r: r[2])
    doc = {
        "alpha": alpha.text(),
        "alpha_float": float(alpha),
        "q_max": args.qmax,
        "grid": args.grid,
        "rows": len(rows),
        "max_deficit": best[2],
        "max_beta": best[0],
    }
    if args.sweep:
        rep = evaluate_area(alpha, args.qmax, "candidate-scan", _frac(args.c), args.workers)
        doc["overall_sup"] = rep.overall_sup
    svg = None
    if args.svg:
        curve = []
        for i in range(512):
            b = float(lo) + (float(hi) - float(lo)) * i / 511
            curve.append((b, (-math.sqrt(b) - math.sqrt(1 / b)) / 2))
        svg = svg_scatter([(r[1], r[2]) for r in rows], curve, title=f"alpha = {alpha.text()}", xlabel="beta", ylabel="deficit")
    return Result(doc, f"max deficit {best[2]!r} at beta={best[0]}", (["beta", "beta_float", "deficit", "kind"], rows), svg)


def cmd_cache(args) -> Result:
    cache = ResultCache(args.cache_dir) if args.cache_dir else ResultCache(default_cache_dir())
    if args.action == "ls":
        entries = cache.ls()
        doc = {"root": str(cache.root), "entries": entries}
        rows = [(e["hash"], e["file"]) for e in entries]
        return Result(doc, f"{len(entries)} entries in {cache.root}", (["hash", "file"], rows))
    removed = cache.gc()
    return Result({"root": str(cache.root), "removed": removed}, f"removed {removed} stale files/entries")


# -- parser --------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", help="print the versioned JSON document")
    common.add_argument("--out", help="data file (.json for JSON, otherwise CSV)")
    common.add_argument("--svg", help="SVG plot (figure4, deficit-curve)")
    common.add_argument("--manifest", help="write a run manifest with output hashes")
    common.add_argument("--workers", type=int, default=None, help="worker processes (default: all CPUs)")
    common.add_argument("--budget", type=int, default=None, help="cap on projected intervals for exact sweeps")
    common.add_argument("--cache-dir", default=None, help="alignment cache directory")
    common.add_argument("--no-cache", action="store_true", help="do not read or write the alignment cache")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized helpers")
    common.add_argument("--prec", type=int, default=None, help="bits for float-mode counting")

    p = _Parser(prog="latticetri", description="Lattice points in right triangles.")
    p.add_argument("--version", action="version", version=f"latticetri {__version__}")
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    c = sub.add_parser("count", parents=[common], help="lattice points in one triangle")
    c.add_argument("--alpha", required=True)
    c.add_argument("--beta", required=True)
    c.set_defaults(func=cmd_count)

    c = sub.add_parser("deficit-curve", parents=[common], help="deficit along a range of areas")
    c.add_argument("--beta", required=True)
    c.add_argument("--alphas")
    c.add_argument("--start")
    c.add_argument("--stop")
    c.add_argument("--step")
    c.set_defaults(func=cmd_deficit_curve)

    c = sub.add_parser("hull", parents=[common], help="hull accounting under a line or a triangle")
    c.add_argument("--beta", required=True)
    c.add_argument("--alpha")
    c.add_argument("--gamma")
    c.add_argument("--N", type=int)
    c.set_defaults(func=cmd_hull)

    c = sub.add_parser("pick", parents=[common], help="Pick check on a lattice polygon")
    c.add_argument("--vertices", required=True, help="x,y;x,y;...")
    c.set_defaults(func=cmd_pick)

    for name, func in (("argmax", cmd_argmax), ("scan-argmax", cmd_scan_argmax)):
        c = sub.add_parser(name, parents=[common], help="best slopes by exact sweep")
        if name == "argmax":
            c.add_argument("--alpha", required=True)
        else:
            c.add_argument("--alphas")
            c.add_argument("--base", default="1")
            c.add_argument("--k-min", type=int, default=1)
            c.add_argument("--k-max", type=int, default=10)
        c.add_argument("--s-lo")
        c.add_argument("--s-hi")
        c.add_argument("--engine", choices=["auto", "stream", "window"], default="auto")
        c.set_defaults(func=func)

    c = sub.add_parser("lambda", parents=[common], help="good rational slopes with q <= qmax")
    c.add_argument("--qmax", type=int, required=True)
    c.set_defaults(func=cmd_lambda)

    c = sub.add_parser("dimension", parents=[common], help="box counts and fitted exponent")
    c.add_argument("--eps", default="1/100,1/1000,1/10000,1/100000")
    c.set_defaults(func=cmd_dimension)

    c = sub.add_parser("align", parents=[common], help="k with aligned radical fractional parts")
    c.add_argument("--radicands", default="")
    c.add_argument("--anchor", type=int, required=True)
    c.add_argument("--epsilon", required=True)
    c.add_argument("--kmax", required=True)
    c.add_argument("--limit", type=int, default=None)
    c.set_defaults(func=cmd_align)

    c = sub.add_parser("badarea", parents=[common], help="search for areas where every slope is poor")
    c.add_argument("--gamma", required=True)
    c.add_argument("--qcand", type=int, default=3)
    c.add_argument("--anchor", type=int, default=None)
    c.add_argument("--epsilon", default="1/2")
    c.add_argument("--kmax", default="10000000")
    c.add_argument("--confirm-qmax", type=int, default=10)
    c.add_argument("--c", default="50")
    c.add_argument("--max-results", type=int, default=1)
    c.add_argument("--max-tries", type=int, default=200)
    c.set_defaults(func=cmd_badarea)

    c = sub.add_parser("evaluate-area", parents=[common], help="sup of the deficit over slopes")
    c.add_argument("--alpha", required=True)
    c.add_argument("--qmax", type=int, default=10)
    c.add_argument("--mode", choices=["candidate-scan", "exact-sweep"], default="candidate-scan")
    c.add_argument("--c", default="50")
    c.set_defaults(func=cmd_evaluate_area)

    c = sub.add_parser("density", parents=[common], help="measure of areas where beta beats 1")
    c.add_argument("--sqrt-beta", required=True)
    c.add_argument("--T", type=int, required=True)
    c.set_defaults(func=cmd_density)

    c = sub.add_parser("figure4", parents=[common], help="deficit against slope at one area")
    c.add_argument("--alpha", required=True)
    c.add_argument("--qmax", type=int, default=20)
    c.add_argument("--grid", type=int, default=2000)
    c.add_argument("--lo", default="1/3")
    c.add_argument("--hi", default="3")
    c.add_argument("--sweep", action="store_true", help="also report the swept sup")
    c.add_argument("--c", default="50")
    c.set_defaults(func=cmd_figure4)

    c = sub.add_parser("cache", parents=[common], help="inspect or clean the alignment cache")
    c.add_argument("action", choices=["ls", "gc"])
    c.set_defaults(func=cmd_cache)
    return p


def _params(args) -> dict:
    skip = {"func", "json", "out", "svg", "manifest"}
    return {k: (v if v is None or isinstance(v, (bool, int)) else str(v)) for k, v in sorted(vars(args).items()) if k not in skip}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        print(f"latticetri: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as e:  # --help / --version
        return int(e.code or 0)
    if args.workers is None:
        args.workers = default_workers()
    if args.workers < 1:
        print("latticetri: error: --workers must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    t0 = time.perf_counter()
    try:
        res = args.func(args)
        doc = {"schema": schema_id(args.cmd), "version": __version__, **res.doc}
        outputs = []
        if args.out:
            if args.out.endswith(".json") or res.table is None:
                text = json_text(doc)
            else:
                text = csv_text(*res.table)
            outputs.append(write_text(args.out, text))
        if args.svg:
            if res.svg is None:
                raise UsageError(f"{args.cmd} has no SVG output")
            outputs.append(write_text(args.svg, res.svg))
        if args.manifest:
            man = RunManifest(args.cmd, _params(args), __version__, time.perf_counter() - t0)
            for o in outputs:
                man.add_output(o)
            man.write(args.manifest)
    except UsageError as e:
        print(f"latticetri: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as e:
        print(f"latticetri: budget exceeded: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except (ValueError, ArithmeticError, OSError) as e:
        print(f"latticetri: error: {e}", file=sys.stderr)
        return EXIT_DOMAIN
    if args.json:
        sys.stdout.write(json_text(doc))
    else:
        print(res.summary)
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
