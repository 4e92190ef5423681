"""Command-line entry point: ``thetanorm {norm,eval,bound,verify,classes}``.

Exit codes: 0 success, 1 verification failure, 2 usage or input error,
3 search stopped by its budget (the partial report is still written).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path

import mpmath

from . import __version__
from .bound import lower_bound, parse_volume, surface_simplicial_volume, surface_volume
from .cache import CACHE_ENV, default_cache_dir
from .cocycle import regular_configuration, theta_direct
from .configfile import ConfigParseError, load_config
from .rational import format_rational, parse_rational
from .search import MODES, class_table, eval_regular, norm
from .verify import SUITES, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3

log = logging.getLogger("thetanorm")


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _dump_json(data) -> str:
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def _csv(rows: list[list], header: list[str]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _decimal(q: Fraction, digits: int = 20) -> str:
    with mpmath.workdps(digits + 10):
        return mpmath.nstr(mpmath.mpf(q.numerator) / q.denominator, digits)


def format_norm_report(report, fmt: str, include_run: bool = False) -> str:
    if fmt == "json":
        return _dump_json(report.to_dict(include_run))
    if fmt == "csv":
        rows = [[",".join(map(str, p)), format_rational(v)] for p, v in report.per_pattern_maxima.items()]
        return _csv(rows, ["pattern", "max_abs_theta"])
    lines = [
        f"n = {report.n}",
        f"mode = {report.mode}",
        f"norm = {format_rational(report.norm)}",
        f"exhaustive = {str(report.exhaustive).lower()}",
        f"complete = {str(report.complete).lower()}",
        f"witness_count = {report.witness_count}",
    ]
    for w in report.witnesses:
        lines.append("witness = " + " | ".join(" ".join(map(str, f)) for f in w.factors))
    for k, v in report.class_counts.items():
        lines.append(f"classes.{k} = {v}")
    for p, v in report.per_pattern_maxima.items():
        lines.append(f"pattern {','.join(map(str, p))} = {format_rational(v)}")
    lines.extend(f"note = {note}" for note in report.notes)
    if include_run:
        lines.append(f"elapsed_seconds = {report.elapsed:.3f}")
        lines.append(f"threads = {report.threads}")
    return "\n".join(lines) + "\n"


def cmd_norm(args) -> int:
    if args.mode in ("exhaustive", "paper-fast") and args.n not in (1, 2, 3):
        raise _Usage(f"--mode {args.mode} supports --n 1, 2 or 3; use regular-only or sample for larger n")
    report = norm(
        args.n, args.mode, threads=args.threads, tile=args.tile, cap=args.cap,
        budget_seconds=args.budget_seconds, cache_dir=args.cache_dir,
        samples=args.samples, seed=args.rng_seed,
    )
    log.info("norm search finished in %.2f s on %d thread(s)", report.elapsed, report.threads)
    text = format_norm_report(report, args.format, args.timing)
    _emit(text, args.out)
    if args.out:
        print(f"norm = {format_rational(report.norm)}")
    return EXIT_OK if report.complete else EXIT_BUDGET


def cmd_eval(args) -> int:
    if args.regular:
        if args.n is None:
            raise _Usage("--regular needs --n")
        cfg = regular_configuration(args.n)
    elif args.config:
        cfg = load_config(args.config)
    else:
        raise _Usage("give a configuration file or --regular --n K")
    value = theta_direct(cfg)
    if args.format == "json":
        text = _dump_json({
            "n": cfg.n,
            "factors": [list(f) for f in cfg.factors],
            "theta": format_rational(value),
            "decimal": _decimal(value),
        })
    else:
        text = f"theta = {format_rational(value)}\ndecimal = {_decimal(value)}\n"
    _emit(text, args.out)
    return EXIT_OK


def cmd_bound(args) -> int:
    if args.surfaces:
        if len(args.surfaces) != args.n:
            raise _Usage(f"--surfaces needs exactly {args.n} genera")
        volume = surface_volume(args.surfaces)
    elif args.volume:
        volume = parse_volume(args.volume)
    else:
        raise _Usage("give --volume or --surfaces")
    if args.norm:
        v, source = parse_rational(args.norm), "given"
    elif args.compute:
        if args.n > 3:
            raise _Usage("--compute supports n <= 3")
        mode = "exhaustive" if args.n <= 2 else "paper-fast"
        v, source = norm(args.n, mode).norm, f"computed ({mode})"
    else:
        if args.n > 6:
            raise _Usage("regular configuration evaluation supports n <= 6")
        v = abs(eval_regular(args.n))
        source = "regular configuration" + (" (equals the searched norm)" if args.n <= 3 else " (conjectural)")
    result = lower_bound(args.n, v, volume, args.digits)
    lines = [
        f"n = {args.n}",
        f"norm = {format_rational(v)}",
        f"norm_source = {source}",
        f"volume = {volume}",
        f"lower_bound = {result.lower_bound}",
        f"symbolic = {result.symbolic}",
    ]
    if result.exact is not None:
        lines.append(f"exact = {format_rational(result.exact)}")
    if args.surfaces:
        sv = [surface_simplicial_volume(g) for g in args.surfaces]
        prod = 1
        for s in sv:
            prod *= s
        lines.append(
            f"product_form = {format_rational(1 / v)} * "
            + " * ".join(str(s) for s in sv)
            + f" = {format_rational(Fraction(prod) / v)}"
        )
        lines.append("note = uses ||surface of genus g|| = 4g - 4")
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    report = run_suite(args.suite, args.rng_seed, args.samples, args.threads, args.cache_dir)
    items = report["items"]
    if args.format == "json":
        data = dict(report)
        data["items"] = [it.to_dict(args.timing) for it in items]
        text = _dump_json(data)
    elif args.format == "csv":
        text = _csv(
            [[it.id, it.location, it.expected, it.computed, it.status] for it in items],
            ["id", "location", "expected", "computed", "status"],
        )
    else:
        lines = [f"{it.status.upper():4} {it.id}  expected {it.expected}  computed {it.computed}  [{it.location}]" for it in items]
        lines.extend(f"context: {c}" for c in report["context"])
        lines.append(f"{report['passed']} passed, {report['failed']} failed")
        text = "\n".join(lines) + "\n"
    _emit(text, args.out)
    if args.out:
        print(f"{report['passed']} passed, {report['failed']} failed")
    return EXIT_OK if report["failed"] == 0 else EXIT_FAIL


def cmd_classes(args) -> int:
    if args.n not in (1, 2, 3):
        raise _Usage("class tables are available for --n 1, 2 or 3")
    compat = None if args.compat == "none" else args.compat
    classes = class_table(args.n, use_reflection=not args.no_reflection, compat=compat)
    if args.format == "json":
        text = _dump_json({
            "n": args.n,
            "compat": args.compat,
            "reflection": not args.no_reflection,
            "count": len(classes),
            "classes": [list(c) for c in classes],
        })
    elif args.format == "csv":
        text = _csv([[i, " ".join(map(str, c))] for i, c in enumerate(classes)], ["index", "ranks"])
    else:
        text = "".join(" ".join(map(str, c)) + "\n" for c in classes)
    _emit(text, args.out)
    return EXIT_OK


class _Usage(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="thetanorm",
        description="Exact sup-norm of the alternated product of circle orientation cocycles.",
        epilog=f"Set {CACHE_ENV} to enable the table cache by default.",
    )
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, formats=("json", "csv", "text"), default="json"):
        sp.add_argument("--out", help="write the report here instead of stdout")
        sp.add_argument("--format", choices=formats, default=default)

    sp = sub.add_parser("norm", help="compute the norm by exhaustive or restricted search")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--mode", choices=MODES, default="exhaustive")
    sp.add_argument("--threads", type=int, default=1)
    sp.add_argument("--cache-dir", default=default_cache_dir())
    sp.add_argument("--tile", type=int, default=256)
    sp.add_argument("--cap", type=int, default=16, help="maximum witnesses reported")
    sp.add_argument("--budget-seconds", type=float)
    sp.add_argument("--samples", type=int, default=1000, help="sample mode only")
    sp.add_argument("--rng-seed", type=int, default=0)
    sp.add_argument("--timing", action="store_true", help="include elapsed time and thread count")
    common(sp)
    sp.set_defaults(func=cmd_norm)

    sp = sub.add_parser("eval", help="evaluate Theta exactly at one configuration")
    sp.add_argument("config", nargs="?")
    sp.add_argument("--regular", action="store_true")
    sp.add_argument("--n", type=int)
    common(sp, ("text", "json"), "text")
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("bound", help="simplicial-volume lower bound from a norm")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--norm", help="override the norm, e.g. 11/45")
    sp.add_argument("--compute", action="store_true", help="run the search for the norm")
    sp.add_argument("--volume", help="e.g. 1, 2.5, pi^3, 8*pi^3")
    sp.add_argument("--surfaces", type=int, nargs="+", metavar="G", help="genera of hyperbolic surface factors")
    sp.add_argument("--digits", type=int, default=30)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_bound)

    sp = sub.add_parser("verify", help="reproduce published values and check identities")
    sp.add_argument("--suite", choices=SUITES, default="all")
    sp.add_argument("--samples", type=int, default=1000)
    sp.add_argument("--rng-seed", type=int, default=0)
    sp.add_argument("--threads", type=int, default=1)
    sp.add_argument("--cache-dir", default=default_cache_dir())
    sp.add_argument("--timing", action="store_true")
    common(sp)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("classes", help="dump configuration class tables")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--compat", choices=("none", "distinct", "stacked"), default="none")
    sp.add_argument("--no-reflection", action="store_true")
    common(sp, default="text")
    sp.set_defaults(func=cmd_classes)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    if getattr(args, "threads", 1) < 1:
        parser.error("--threads must be at least 1")
    try:
        return args.func(args)
    except _Usage as exc:
        parser.error(str(exc))
    except ConfigParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
