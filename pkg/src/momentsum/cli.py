"""Command line interface.

Exit codes: 0 success, 2 parse or usage error, 3 math-domain error,
4 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction
from pathlib import Path

from .dsl import ParseError, parse_expression, parse_problem_file, _real_value
from .errors import MathDomainError, NumericalError
from .pipeline import StageError, rerun_from_manifest, run_pipeline

EXIT_OK, EXIT_PARSE, EXIT_DOMAIN, EXIT_NUMERIC = 0, 2, 3, 4


def _real(text: str) -> float:
    try:
        return _real_value(parse_expression(text))
    except (ParseError, ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a real number: {text!r}") from exc


def _grid(text: str) -> list:
    return [_real(part) for part in text.split(",")]


def _global_flags(p: argparse.ArgumentParser):
    p.add_argument("--nt", type=int, help="t truncation order")
    p.add_argument("--nz", type=int, help="z truncation order")
    p.add_argument("--rprime", type=Fraction, help="radius r' of the coefficient norms")
    p.add_argument("--direction", type=_real, help="summation direction in radians (pi allowed)")
    p.add_argument("--alpha", type=_real, help="summation order (default: predicted order)")
    p.add_argument("--z0", type=_real, help="real z at which the t-series is summed")
    p.add_argument("--tgrid", type=_grid, help="comma separated t values")
    p.add_argument("--out", default="out", help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="momentsum", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in (
        ("solve", "formal solution only"),
        ("growth", "formal solution and coefficient growth fit"),
        ("sum", "solution, growth fit and directional summation"),
        ("run", "full pipeline; sums only when a direction is given"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("problem", help="problem file")
        _global_flags(p)
    p = sub.add_parser("rerun", help="reproduce a run from its manifest")
    p.add_argument("manifest")
    p.add_argument("--out", default="out-rerun")

    kp = sub.add_parser("kernels", help="kernel diagnostics")
    ksub = kp.add_subparsers(dest="kernels_command", required=True)
    kc = ksub.add_parser("check", help="Mellin moments and Mittag-Leffler cross-check")
    kc.add_argument("--alpha", type=_real, action="append")
    kc.add_argument("--pmax", type=int, default=10)

    sp = sub.add_parser("sequence", help="moment sequence tools")
    ssub = sp.add_subparsers(dest="sequence_command", required=True)
    sa = ssub.add_parser("audit", help="lc / mg / snq audit of a moment spec")
    sa.add_argument("spec", help="e.g. gevrey(1/2) or product(gevrey(1), qfact(1/2))")
    sa.add_argument("--prefix", type=int, default=60)
    return parser


def _overrides(args) -> dict:
    keys = ("nt", "nz", "rprime", "direction", "alpha", "z0", "tgrid")
    return {k: getattr(args, k) for k in keys if getattr(args, k, None) is not None}


def _cmd_pipeline(args) -> int:
    text = Path(args.problem).read_text(encoding="utf-8")
    pf = parse_problem_file(text, args.nt, args.nz)
    overrides = _overrides(args)
    stages = {
        "solve": ("solve",),
        "growth": ("solve", "growth"),
        "sum": ("solve", "growth", "sum"),
    }.get(args.command)
    if stages is None:
        has_direction = "direction" in overrides or "direction" in pf.options
        stages = ("solve", "growth", "sum") if has_direction else ("solve", "growth")
    result = run_pipeline(pf, overrides, args.out, stages)
    summary = {"out": str(args.out), "files": sorted(result.files)}
    if result.growth is not None:
        summary["fitted_sigma"] = result.growth.fitted_sigma
        summary["predicted_sigma"] = result.growth.predicted_sigma
        r = result.radius
        summary["radius_estimate"] = r if r is None or math.isfinite(r) else "inf"
    if result.summation is not None:
        summary["singular_directions"] = result.summation.pade_diagnostics["singular_directions"]
    print(json.dumps(summary, indent=2, sort_keys=True))
    return EXIT_OK


def _cmd_rerun(args) -> int:
    result = rerun_from_manifest(args.manifest, args.out)
    print(json.dumps({"out": str(args.out), "files": sorted(result.files)}, indent=2))
    return EXIT_OK


def _cmd_kernels(args) -> int:
    from .kernels import mittag_leffler_contour, mittag_leffler_series, moment_check

    alphas = args.alpha or [0.5, 1.0, 1.5]
    report = {"moment_check": {}, "mittag_leffler_dual": {}}
    for a in alphas:
        report["moment_check"][repr(a)] = [moment_check(a, p) for p in range(args.pmax + 1)]
        z = -4.0
        s, c = mittag_leffler_series(a, z), mittag_leffler_contour(a, z)
        report["mittag_leffler_dual"][repr(a)] = {"z": z, "series": [s.real, s.imag],
                                                 "contour": [c.real, c.imag], "difference": abs(s - c)}
    print(json.dumps(report, indent=2, sort_keys=True))
    return EXIT_OK


def _cmd_sequence(args) -> int:
    from .dsl import Entry, _moment_spec
    from .sequences import check_lc, check_mg, check_order, check_snq, custom_sequence

    ast = parse_expression(args.spec)
    m = _moment_spec(ast, Entry("spec", args.spec, ast, 1, 1))
    seq = custom_sequence([m(p) / m(0) for p in range(args.prefix + 2)])
    reports = [check_lc(seq, args.prefix), check_mg(seq, args.prefix), check_snq(seq, args.prefix)]
    out = {"spec": m.spec(), "prefix": args.prefix, "properties": [r.to_json() for r in reports]}
    if m.claimed_order is not None:
        order = check_order(m, args.prefix)
        out["order"] = {"s": str(order.s), "a3": order.a3, "a4": order.a4, "holds": order.holds}
    print(json.dumps(out, indent=2, sort_keys=True, default=str))
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command in ("solve", "growth", "sum", "run"):
            return _cmd_pipeline(args)
        if args.command == "rerun":
            return _cmd_rerun(args)
        if args.command == "kernels":
            return _cmd_kernels(args)
        return _cmd_sequence(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except StageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _code(exc.cause)
    except (MathDomainError, NumericalError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _code(exc)


def _code(exc) -> int:
    if isinstance(exc, ParseError):
        return EXIT_PARSE
    if isinstance(exc, NumericalError):
        return EXIT_NUMERIC
    return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
