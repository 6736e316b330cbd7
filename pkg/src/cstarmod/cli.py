"""``cstarmod`` command line: ``verify``, ``scan-defect`` and ``compute``.

Exit status: 0 all pass, 1 verification failure, 2 usage or I/O error.
"""

from __future__ import annotations

import argparse
import logging
import sys

from . import harness
from .errors import CStarModError, ConfigError

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _algebra(text: str) -> list[int]:
    try:
        dims = [int(v) for v in text.replace("-", ",").split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma list of block sizes, got {text!r}") from None
    if not dims or any(n < 1 for n in dims):
        raise argparse.ArgumentTypeError(f"block sizes must be positive, got {text!r}")
    return dims


def _tolerance(text: str) -> tuple[str, float]:
    """``name=value``; a bare number sets the rank tolerance."""
    name, _, value = text.rpartition("=")
    try:
        return (name or "rank"), float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected NAME=VALUE or a number, got {text!r}") from None


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    return v


def _run_options(p: argparse.ArgumentParser, default_trials: int) -> None:
    p.add_argument("--trials", type=_positive, default=default_trials, help="trials per algebra")
    p.add_argument("--seed", type=int, default=0, help="master seed (64-bit unsigned)")
    p.add_argument(
        "--algebra", type=_algebra, action="append",
        help="block sizes of A, e.g. 1,2 for M_1 + M_2; repeat for several algebras",
    )
    p.add_argument("--rank-k", type=_positive, default=None, help="rank of the domain module (random 1..3 if unset)")
    p.add_argument("--rank-m", type=_positive, default=None, help="rank of the codomain module (random 1..3 if unset)")
    p.add_argument("--tol", type=_tolerance, action="append", default=[], help="NAME=VALUE override, or rank tolerance")
    p.add_argument("--out", default=None, help="output file (stdout if omitted)")
    p.add_argument("--workers", type=_positive, default=1, help="worker processes")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cstarmod", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run verification suites on random instances")
    v.add_argument("--suite", default="all", help=f"comma list of {', '.join(harness.SUITES)} or all")
    v.add_argument("--format", choices=("json", "csv"), default="json")
    _run_options(v, 100)

    s = sub.add_parser("scan-defect", help="scan the defect of the gamma(PQ) inequality")
    s.add_argument("--format", choices=("json", "csv"), default="csv")
    _run_options(s, 1000)

    c = sub.add_parser("compute", help="evaluate c0, gamma, mpinv or defect on stored inputs")
    c.add_argument("quantity", choices=harness.COMPUTE_COMMANDS)
    c.add_argument("inputs", nargs="+")
    c.add_argument("--out", default=None, help="output file for mpinv")
    return parser


def _config(args) -> harness.RunConfig:
    ranks = None if args.rank_k is None and args.rank_m is None else (args.rank_k, args.rank_m)
    return harness.RunConfig(
        master_seed=args.seed,
        algebra_dims=args.algebra or [list(f) for f in harness.DEFAULT_FAMILIES],
        module_ranks=ranks,
        trials=args.trials,
        tolerances=dict(args.tol),
        suite=getattr(args, "suite", "all"),
        out=args.out,
        format=args.format,
        workers=args.workers,
    )


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        if args.command == "compute":
            sys.stdout.write(harness.compute(args.quantity, args.inputs, args.out))
            return EXIT_OK
        config = _config(args)
        if args.command == "verify":
            harness.suite_names(config.suite)
            return harness.run_verify(config)
        return harness.run_defect_scan(config)
    except (CStarModError, ConfigError, OSError) as exc:
        print(f"cstarmod: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
