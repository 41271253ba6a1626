"""Command-line front end for the verification suites and the profile solver."""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .errors import GeometryError
from .reports import (
    DEFAULT_SAMPLES,
    ConfigError,
    Report,
    bochner_suite,
    codazzi_suite,
    hopf_invariants_suite,
    resolve_tolerances,
    scan_conformal_suite,
    solve_ode_suite,
    structure_suite,
)

COMMANDS = ("verify-structure", "verify-bochner", "hopf-invariants", "solve-ode", "scan-conformal", "codazzi-check")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hopfgraphs", description="Numerical checks for graphs of maps between round spheres.")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--samples", type=int, default=None, help="sample points per check (suite default if omitted)")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--k", type=int, default=None)
    parser.add_argument("--l", type=int, default=None)
    parser.add_argument("--c", type=float, default=1.0, help="constant of the conformal profile family")
    parser.add_argument("--moebius", action="append", default=None, metavar="a,b,c,d", help="Moebius matrix entries as re+imi; repeatable")
    parser.add_argument("--target-radius", type=float, default=None)
    parser.add_argument("--out", default=None, help="report path (stdout if omitted)")
    parser.add_argument("--format", choices=("json", "csv"), default="json")
    parser.add_argument("--tol", action="append", default=[], metavar="NAME=VALUE", help="override one tolerance; repeatable")
    return parser


def _overrides(items) -> dict:
    out = {}
    for item in items:
        name, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--tol expects NAME=VALUE, got {item!r}")
        out[name.strip()] = value.strip()
    return out


def _profile_csv(rows) -> str:
    lines = ["s,a,a_s,residual"]
    lines += [",".join(format(v, ".17g") for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        tol = resolve_tolerances(_overrides(args.tol))
        samples = DEFAULT_SAMPLES[args.command] if args.samples is None else args.samples
        if samples < 1:
            raise ConfigError("--samples must be at least 1")
        if not 0 <= args.seed < 2**64:
            raise ConfigError("--seed must be a 64-bit unsigned integer")
        if args.target_radius is not None and not args.target_radius > 0:
            raise ConfigError("--target-radius must be positive")
        if args.command == "verify-bochner" and args.target_radius not in (None, 1.0):
            raise ConfigError("verify-bochner checks formulas for the unit target sphere only")
        if args.k == 0 or args.l == 0:
            raise ConfigError("--k and --l must be nonzero")
        rng = np.random.default_rng(args.seed)
        report = Report(args.command, args.seed)
        body = None
        k = 1 if args.k is None else args.k
        if args.command == "hopf-invariants":
            report.checks = hopf_invariants_suite(samples, rng, tol, args.target_radius)
        elif args.command == "scan-conformal":
            report.checks = scan_conformal_suite(samples, rng, tol, k, 2 if args.l is None else args.l, args.c, args.moebius)
        elif args.command == "verify-structure":
            report.checks = structure_suite(samples, rng, tol, k, 1 if args.l is None else args.l)
        elif args.command == "verify-bochner":
            report.checks = bochner_suite(samples, rng, tol, args.moebius)
        elif args.command == "codazzi-check":
            report.checks = codazzi_suite(samples, rng, tol, k, 1 if args.l is None else args.l)
        else:
            outcome = solve_ode_suite(tol, k, 1 if args.l is None else args.l)
            report.checks = outcome.checks
            if args.format == "csv" and outcome.rows is not None:
                body = _profile_csv(outcome.rows)
    except ConfigError as exc:
        print(f"hopfgraphs: configuration error: {exc}", file=sys.stderr)
        return 2
    except GeometryError as exc:
        print(f"hopfgraphs: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1

    if body is None:
        body = report.to_json() if args.format == "json" else report.to_csv()
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(body)
    else:
        sys.stdout.write(body)
    print(f"{report.suite}: {report.passed} passed, {report.failed} failed", file=sys.stderr)
    return 0 if report.failed == 0 else 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
