"""Command-line front end.

Commands: ``analyze`` (convergence verdict with trace), ``radius``
(power-series radius and interval), ``oracle`` (high-precision
numerics), and ``corpus`` (score a ground-truth file).

Exit codes: 0 for a decisive result, 2 for Inconclusive, 1 for errors.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from fractions import Fraction

import mpmath

from . import expr as X
from . import oracle, tests
from .corpus import load_corpus, load_default, score
from .errors import EngineError
from .exactnum import CSum, K
from .power_series import interval as ps_interval

__all__ = ["main"]

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INCONCLUSIVE = 2

_SINGLE_TESTS = {
    "nth_term": tests.nth_term_test,
    "p_series": tests.p_series_test,
    "generalized_p_series": tests.generalized_p_series_test,
    "ratio": tests.ratio_test,
    "raabe": tests.raabe_test,
    "generalized_ratio": tests.generalized_ratio_test,
    "nth_root": tests.nth_root_test,
    "condensation": tests.condensation_test,
    "boundary": tests.boundary_test,
    "alternating": tests.alternating_test,
    "exp": tests.exp_test,
    "lhopital": tests.lhopital_test,
}


def _parse_term(text: str, var: str):
    """Parse, retrying once with the variable named in the source text."""
    try:
        return X.parse(text, var), var
    except EngineError as exc:
        m = re.search(r"unknown identifier '(\w+)'", str(exc))
        if m and var == "n":
            other = m.group(1)
            return X.parse(text, other), other
        raise


def _jsonable(v):
    if isinstance(v, CSum) or isinstance(v, K):
        return float(v.approx())
    if isinstance(v, Fraction):
        return int(v) if v.denominator == 1 else str(v)
    if isinstance(v, mpmath.mpf):
        return float(v)
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def _aux_block(aux: dict) -> dict:
    out = {k: None for k in ("ratio", "raabe", "w", "p", "radius")}
    for k, v in aux.items():
        if k in out:
            out[k] = _jsonable(v)
    return out


def _numeric_block(a, var, precision) -> dict:
    out = {"windows": [], "rates": []}
    try:
        prof = oracle.profile(a, precision=min(precision, 128), var=var)
        out["windows"] = [[n, float(w)] for n, w in prof.windows]
        out["rates"] = [[n, float(r)] for n, r in prof.rate_samples]
    except Exception:
        pass
    return out


def _print_json(payload):
    json.dump(payload, sys.stdout, indent=2, default=_jsonable)
    sys.stdout.write("\n")


def _verdict_summary(v) -> str:
    bits = []
    for k in ("w", "p", "ratio", "raabe"):
        if k in v.auxiliary and v.auxiliary[k] is not None:
            bits.append(f"{k}={_jsonable(v.auxiliary[k])}")
    inside = ", ".join([v.deciding_test or "no test"] + bits)
    return f"{v.outcome} ({inside})"


def cmd_analyze(args) -> int:
    a, args.var = _parse_term(args.term, args.var)
    tests.BOUNDARY_DEPTH, saved = args.max_depth, tests.BOUNDARY_DEPTH
    try:
        if args.test:
            fn = _SINGLE_TESTS[args.test]
            v = fn(a, var=args.var)
        else:
            v = tests.auto(a, var=args.var)
    finally:
        tests.BOUNDARY_DEPTH = saved
    if args.json:
        _print_json({
            "input": args.term,
            "normalized": X.format_expr(a),
            "verdict": v.outcome,
            "deciding_test": v.deciding_test,
            "auxiliary": _aux_block(v.auxiliary),
            "trace": v.trace.as_list(),
            "numeric": _numeric_block(a, args.var, args.precision),
        })
    else:
        print(_verdict_summary(v))
        for s in v.trace.steps:
            print(f"  [{s.rule}] {s.before} => {s.after}")
    return EXIT_OK if v.decisive else EXIT_INCONCLUSIVE


def cmd_radius(args) -> int:
    a, args.var = _parse_term(args.coeff, args.var)
    res = ps_interval(a, center=Fraction(args.center), var=args.var)
    rtext = res.radius if isinstance(res.radius, str) else (
        X.format_expr(res.radius) if res.radius is not None
        else mpmath.nstr(res.approx, 12))
    if args.json:
        payload = {
            "input": args.coeff,
            "normalized": X.format_expr(a),
            "radius": rtext,
            "exact": res.exact,
            "center": _jsonable(res.center),
            "interval": res.interval_text(),
            "left_closed": res.left_closed,
            "right_closed": res.right_closed,
            "endpoints": {},
        }
        for side, v in (("left", res.endpoint_left),
                        ("right", res.endpoint_right)):
            if v is not None:
                payload["endpoints"][side] = {
                    "verdict": v.outcome,
                    "deciding_test": v.deciding_test,
                    "trace": v.trace.as_list(),
                }
        _print_json(payload)
    else:
        print(f"r = {rtext}, interval {res.interval_text()}")
        for side, v in (("left", res.endpoint_left),
                        ("right", res.endpoint_right)):
            if v is not None:
                print(f"  {side} endpoint: {_verdict_summary(v)}")
    return EXIT_OK


def cmd_oracle(args) -> int:
    a, args.var = _parse_term(args.term, args.var)
    prec = args.precision
    eps = mpmath.mpf(2) ** -(prec // 2)
    if args.sum is not None:
        val = oracle.partial_sum(a, args.sum, prec, start=args.start,
                                 var=args.var)
        label = f"partial sum to N={args.sum}"
    elif args.window is not None:
        val = oracle.cauchy_window(a, args.window, prec, var=args.var)
        label = f"window 2^{args.window - 1}..2^{args.window}"
    else:
        val = oracle.rate(a, args.rate, prec, var=args.var)
        label = f"rate at n={args.rate}"
    if args.json:
        _print_json({"input": args.term, "kind": label,
                     "value": mpmath.nstr(val, prec // 3),
                     "error_bound": float(eps)})
    else:
        print(f"{label}: {mpmath.nstr(val, 20)}  (rounding bound ~{float(eps):.1e})")
    return EXIT_OK


def cmd_corpus(args) -> int:
    entries = load_corpus(args.path) if args.path else load_default()
    rep = score(entries, jobs=args.jobs)
    if args.json:
        _print_json({
            "entries": len(entries),
            "counts": rep.counts,
            "results": [{"id": r.entry.id, "expr": r.entry.expr_text,
                         "expect": r.entry.expect, "got": r.got,
                         "status": r.status, "detail": r.detail}
                        for r in rep.results],
        })
    else:
        for r in rep.results:
            mark = "ok  " if r.status == "pass" else r.status.upper().ljust(4)
            extra = f" ({r.detail})" if r.detail else ""
            print(f"{mark} {r.entry.id:6s} {r.entry.expr_text:42s} "
                  f"expect {r.entry.expect} got {r.got}{extra}")
        c = rep.counts
        print(f"{len(entries)} entries: {c['pass']} pass, {c['fail']} fail, "
              f"{c['inconclusive']} inconclusive, {c['error']} error")
    return EXIT_OK if not rep.contradictions else EXIT_ERROR


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="convsum",
        description="Symbolic-numeric convergence analysis for series.")
    p.add_argument("--var", default="n", help="index variable (default n)")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.add_argument("--precision", type=int, default=256,
                   help="working precision in bits (default 256)")
    p.add_argument("--max-depth", type=int, default=6,
                   help="boundary-family search depth (default 6)")
    p.add_argument("--test", choices=sorted(_SINGLE_TESTS),
                   help="force a single convergence test")
    sub = p.add_subparsers(dest="command", required=True)

    pa = sub.add_parser("analyze", help="decide convergence of sum a(n)")
    pa.add_argument("term", help="term expression, e.g. '1/n^2'")
    pa.set_defaults(fn=cmd_analyze)

    pr = sub.add_parser("radius", help="power-series radius and interval")
    pr.add_argument("coeff", help="coefficient expression a(n)")
    pr.add_argument("--center", default="0", help="series center (rational)")
    pr.set_defaults(fn=cmd_radius)

    po = sub.add_parser("oracle", help="high-precision numeric evaluation")
    po.add_argument("term", help="term expression")
    g = po.add_mutually_exclusive_group(required=True)
    g.add_argument("--sum", type=int, metavar="N", help="partial sum to N")
    g.add_argument("--window", type=int, metavar="n",
                   help="Cauchy window s(2^n) - s(2^(n-1))")
    g.add_argument("--rate", type=int, metavar="n", help="convergence rate at n")
    po.add_argument("--start", type=int, default=1, help="first index (default 1)")
    po.set_defaults(fn=cmd_oracle)

    pc = sub.add_parser("corpus", help="score a ground-truth corpus file")
    pc.add_argument("path", nargs="?", help="corpus file (default: shipped corpus)")
    pc.add_argument("--jobs", type=int, default=4, help="worker threads")
    pc.set_defaults(fn=cmd_corpus)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except EngineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
