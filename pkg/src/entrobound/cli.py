"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 parse / config error,
3 precondition error, 4 I/O error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys

from . import tilt
from .entropy import jensen_bound, relative_entropy
from .errors import ConfigError, DomainError, PreconditionError, SpecParseError, DegenerateMeasureError
from .measures import MomentPair, is_dirac_at_zero, is_symmetric, moments, parse_spec
from .report import encode_number, fmt6, to_csv, to_json, to_table
from .verify import (
    SuiteConfig, check_proposition, load_config, make_grid, run_suite, sweep_min_g, evaluate_grid,
)

log = logging.getLogger("entrobound")

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_PRECONDITION, EXIT_IO = range(5)


class _Exit(Exception):
    def __init__(self, code, message):
        self.code = code
        super().__init__(message)


def _measure(spec, flag):
    try:
        return parse_spec(spec)
    except (SpecParseError, DegenerateMeasureError) as exc:
        raise _Exit(EXIT_PARSE, f"{flag}: {exc}") from exc


def _emit(text, out):
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    try:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise _Exit(EXIT_IO, f"cannot write {out}: {exc}") from exc


def _render(pairs, fmt):
    """key/value pairs as table lines, a JSON object, or a two-row CSV."""
    if fmt == "json":
        return json.dumps({k: encode_number(v) if isinstance(v, float) else v for k, v in pairs},
                          indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([k for k, _ in pairs])
        w.writerow([_csv_cell(v) for _, v in pairs])
        return buf.getvalue()
    return "".join(f"{k}={fmt6(v) if isinstance(v, float) else v}\n" for k, v in pairs)


def _csv_cell(v):
    if isinstance(v, float):
        v = encode_number(v)
        return v if isinstance(v, str) else repr(v)
    return "" if v is None else str(v)


def cmd_entropy(args):
    mu = _measure(args.mu, "--mu")
    rho = _measure(args.rho, "--rho")
    if is_dirac_at_zero(mu):
        raise _Exit(EXIT_PRECONDITION, "--mu is the Dirac mass at 0; F is 0/0")
    h = relative_entropy(mu, rho)
    m = moments(mu)
    pairs = [("H", h.value), ("F", jensen_bound(mu)), ("m1", m.x), ("m2", m.y),
             ("absolutely_continuous", h.absolutely_continuous)]
    _emit(_render(pairs, args.format), args.out)
    return EXIT_OK


def cmd_cramer(args):
    rho = _measure(args.rho, "--rho")
    res = tilt.cramer_transform(rho, MomentPair(args.x, args.y))
    pairs = [("I", res.value)]
    if isinstance(res.argmax, tilt.TiltParams):
        pairs += [("u", res.argmax.u), ("v", res.argmax.v)]
    else:
        pairs += [("argmax", res.argmax)]
    pairs += [("iterations", res.iterations), ("converged", res.converged), ("region", res.region)]
    if is_symmetric(rho) and args.y != 0:
        pairs.append(("W", tilt.witness_bound(rho, args.x, args.y)))
    _emit(_render(pairs, args.format), args.out)
    return EXIT_OK


def cmd_verify(args):
    try:
        cfg = SuiteConfig() if args.suite == "default" else load_config(args.suite)
    except OSError as exc:
        raise _Exit(EXIT_IO, f"cannot read suite {args.suite}: {exc}") from exc
    except ConfigError as exc:
        raise _Exit(EXIT_PARSE, f"suite config: {exc}") from exc
    if args.seed is not None:
        cfg.seed = args.seed
    report = run_suite(cfg)
    render = {"json": to_json, "csv": to_csv, "table": to_table}[args.format]
    _emit(render(report), args.out)
    s = report.summary
    log.info("suite %s: %d checks, %d passed, %d failed", report.suite, s["total"], s["passed"], s["failed"])
    return EXIT_OK if report.passed else EXIT_FAIL


SWEEP_HEADER = ["x", "y", "I", "xx_over_2y", "G", "margin"]


def cmd_sweep(args):
    rho = _measure(args.rho, "--rho")
    try:
        grid = make_grid(args.points, args.x_max, args.y_min, args.y_max, rho)
    except ConfigError as exc:
        raise _Exit(EXIT_PARSE, str(exc)) from exc
    try:
        if not is_symmetric(rho):
            raise PreconditionError("--rho must be symmetric")
        if is_dirac_at_zero(rho):
            raise PreconditionError("--rho is the Dirac mass at 0")
        rows = evaluate_grid(rho, grid)
        if args.what == "proposition":
            report = check_proposition(rho, grid, rows, args.rho)
            margins = [c.margins[0] for c in report.checks]
        else:
            report = sweep_min_g(rho, grid, rows, args.rho)
            g_min = report.checks[0].margins[0]
            margins = [r.G - g_min for r in rows]
    except (PreconditionError, DomainError) as exc:
        raise _Exit(EXIT_PRECONDITION, str(exc)) from exc

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_HEADER)
    for r, margin in zip(rows, margins):
        w.writerow([_csv_cell(v) for v in (r.x, r.y, r.I, r.bound, r.G, margin)])
    _emit(buf.getvalue(), args.out)
    s = report.summary
    log.info("%s sweep: %d checks, %d failed", args.what, s["total"], s["failed"])
    return EXIT_OK if report.passed else EXIT_FAIL


def build_parser():
    p = argparse.ArgumentParser(
        prog="entrobound",
        description="Relative entropy, Cramer transforms of (Z, Z^2), and checks of the "
                    "symmetric-reference entropy lower bound.",
    )
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("entropy", help="H(mu|rho), F(mu) and the first two moments of mu")
    e.add_argument("--mu", required=True)
    e.add_argument("--rho", required=True)
    e.set_defaults(func=cmd_entropy)

    c = sub.add_parser("cramer", help="I(x, y) for (Z, Z^2) under rho")
    c.add_argument("--rho", required=True)
    c.add_argument("--x", type=float, required=True)
    c.add_argument("--y", type=float, required=True)
    c.set_defaults(func=cmd_cramer)

    for sp in (e, c):
        sp.add_argument("--format", choices=("table", "json", "csv"), default="table")
        sp.add_argument("--out", default=None, help="output file (default stdout)")

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("--suite", default="default", help="'default' or a JSON suite config path")
    v.add_argument("--seed", type=int, default=None)
    v.add_argument("--out", default=None, help="report file (default stdout)")
    v.add_argument("--format", choices=("json", "csv", "table"), default="json")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("sweep", help="grid sweep of I(x, y) - x^2/(2y) as CSV")
    s.add_argument("--rho", required=True)
    s.add_argument("--what", choices=("proposition", "min-g"), default="proposition")
    s.add_argument("--points", type=int, default=39, help="grid points per axis")
    s.add_argument("--x-max", type=float, default=None)
    s.add_argument("--y-min", type=float, default=None)
    s.add_argument("--y-max", type=float, default=None)
    s.add_argument("--out", default=None, help="CSV file (default stdout)")
    s.set_defaults(func=cmd_sweep)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except _Exit as exc:
        print(f"entrobound: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    raise SystemExit(main())
