"""Command-line verification harness.

Exit codes: 0 all checks pass, 1 some check failed, 2 bad configuration,
3 I/O error.
"""

from __future__ import annotations

import argparse
import math
import sys

from .approx import tusnady_bounds
from .binom_exact import log_tail_exact
from .cutpoints import build_table, export_csv
from .errors import DomainError, RangeError
from .normal_tail import psi, r_remainder, rho
from .verify import (
    ConstantsReport,
    SweepConfig,
    VerificationRecord,
    coupling_check,
    emit_report,
    load_config,
    run_sweep,
)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_BAD_CONFIG = 2
EXIT_IO_ERROR = 3


def _fmt(x: float) -> str:
    return format(x, ".17g")


def _emit(records: list[VerificationRecord], constants: ConstantsReport,
          fmt: str, out: str | None, config: SweepConfig) -> int:
    payload = emit_report(records, constants, fmt, config)
    try:
        if out:
            with open(out, "wb") as fh:
                fh.write(payload)
        else:
            sys.stdout.buffer.write(payload)
    except OSError as exc:
        print(f"error: cannot write report: {exc}", file=sys.stderr)
        return EXIT_IO_ERROR
    failures = [r for r in records if not r.passed]
    for r in failures:
        print(f"FAILED {r.check_name} at (n={r.n}, k={r.k}), "
              f"slack {_fmt(r.slack)}", file=sys.stderr)
    return EXIT_CHECK_FAILED if failures else EXIT_OK


def _load(args) -> SweepConfig:
    if getattr(args, "config", None):
        return load_config(args.config)
    return SweepConfig()


def cmd_tails(args) -> int:
    t = log_tail_exact(args.n, args.k)
    print(f"n = {t.n}  k = {t.k}")
    print(f"numerator bits = {t.numerator.bit_length()}")
    print(f"log_prob = {_fmt(t.log_prob)}")
    print(f"prob     = {_fmt(math.exp(t.log_prob))}")
    return EXIT_OK


def cmd_cutpoints(args) -> int:
    table = build_table(args.n)
    if args.csv:
        try:
            export_csv(table, args.csv)
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_IO_ERROR
        return EXIT_OK
    print("n,k,epsilon,z,beta,log_tail")
    for rec in table.records:
        print(f"{rec.n},{rec.k},{_fmt(rec.epsilon)},{_fmt(rec.z)},"
              f"{_fmt(rec.beta)},{_fmt(rec.log_tail)}")
    return EXIT_OK


def _filtered_sweep(args, prefixes: tuple[str, ...]) -> int:
    config = _load(args)
    records, constants = run_sweep(config)
    records = [r for r in records if r.check_name.startswith(prefixes)]
    return _emit(records, constants, args.format, args.out, config)


def cmd_theorem1(args) -> int:
    return _filtered_sweep(args, ("thm1_", "eq11_"))


def cmd_theorem2(args) -> int:
    return _filtered_sweep(args, ("thm2_", "sandwich_", "defining_eq"))


def cmd_tusnady(args) -> int:
    return _filtered_sweep(args, ("tusnady_",))


def cmd_sweep(args) -> int:
    config = _load(args)
    fmt = args.format or config.output_format
    records, constants = run_sweep(config)
    return _emit(records, constants, fmt, args.out, config)


def cmd_lemma1(args) -> int:
    """Monotonicity of rho and r, and the three psi-increment inequalities,
    on a grid of x with a fixed set of increments."""
    try:
        a, b, step = (float(v) for v in args.grid.split(":"))
    except ValueError:
        print(f"error: bad grid {args.grid!r}, expected a:b:step",
              file=sys.stderr)
        return EXIT_BAD_CONFIG
    if step <= 0 or b <= a:
        print("error: grid must have b > a and step > 0", file=sys.stderr)
        return EXIT_BAD_CONFIG
    deltas = (0.01, 0.1, 1.0, 5.0)
    tol = 1e-10
    n_pts = int(round((b - a) / step)) + 1
    worst = math.inf
    failures = 0
    prev_rho, prev_r = -math.inf, math.inf
    for i in range(n_pts):
        x = a + i * step
        rh, rr, px = rho(x), r_remainder(x), psi(x)
        if not (rh > prev_rho and rr < prev_r):
            failures += 1
        prev_rho, prev_r = rh, rr
        for d in deltas:
            inc = psi(x + d) - px
            slacks = (
                inc - d * rh,                    # (i) lower
                d * rho(x + d) - inc,            # (i) upper
                inc - (x + d) ** 2 / 2 + x * x / 2
                - d * r_remainder(x + d),        # (ii) lower
                d * rr - (inc - (x + d) ** 2 / 2 + x * x / 2),  # (ii) upper
                inc - x * d - d * d / 2,         # (iii) lower
                rh * d + d * d / 2 - inc,        # (iii) upper
            )
            worst = min(worst, *slacks)
            if min(slacks) < -tol:
                failures += 1
    print(f"grid [{a}, {b}] step {step}: {n_pts} points, "
          f"{failures} failures, worst slack {_fmt(worst)}")
    return EXIT_OK if failures == 0 else EXIT_CHECK_FAILED


def cmd_coupling(args) -> int:
    max_excess, c = coupling_check(args.n)
    print(f"n = {args.n}")
    print(f"max_k (k - beta_k) = {_fmt(max_excess)}")
    print(f"c_coupling = {_fmt(c)}")
    return EXIT_OK if max_excess <= 1.0 + 1e-9 else EXIT_CHECK_FAILED


def _add_sweep_args(p) -> None:
    p.add_argument("--config", help="flat key=value config file")
    p.add_argument("--format", choices=("csv", "json"), default=None)
    p.add_argument("--out", help="write report here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bincoupling",
        description="Verify the Bin(n,1/2) vs N(n/2,n/4) quantile coupling "
                    "and its tail/cutpoint approximations.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tails", help="exact tail probability")
    p.add_argument("n", type=int)
    p.add_argument("k", type=int)
    p.set_defaults(func=cmd_tails)

    p = sub.add_parser("cutpoints", help="cutpoint table for one n")
    p.add_argument("n", type=int)
    p.add_argument("--csv", help="write the table as CSV")
    p.set_defaults(func=cmd_cutpoints)

    for name, func in (("theorem1", cmd_theorem1),
                       ("theorem2", cmd_theorem2),
                       ("tusnady", cmd_tusnady)):
        p = sub.add_parser(name, help=f"{name} checks over a sweep")
        _add_sweep_args(p)
        p.set_defaults(func=func, format_default="csv")

    p = sub.add_parser("lemma1", help="hazard-rate increment inequalities")
    p.add_argument("--grid", default="-8:8:0.001", metavar="a:b:step")
    p.set_defaults(func=cmd_lemma1)

    p = sub.add_parser("coupling", help="worst-case coupling analysis")
    p.add_argument("n", type=int)
    p.set_defaults(func=cmd_coupling)

    p = sub.add_parser("sweep", help="full verification sweep")
    _add_sweep_args(p)
    p.set_defaults(func=cmd_sweep)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "format", None) is None and hasattr(args, "format"):
        args.format = "csv"
    try:
        return args.func(args)
    except (DomainError, RangeError, OSError) as exc:
        if isinstance(exc, OSError):
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_IO_ERROR
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_CONFIG


if __name__ == "__main__":
    sys.exit(main())
