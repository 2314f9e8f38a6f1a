"""
Command-line entry point.

    python -m src.shell.cli solve --all BAequ4_in.txt BAequ4_out.txt
    python -m src.shell.cli solve --count fixtures/SO.txt --jobs max
    python -m src.shell.cli tba fixtures/bounded_posets.thy --models

Exit codes: 0 success (also when there are no models), 1 usage, parse or
input errors, 2 feasibility cap exceeded.
"""

import argparse
import logging
import os
import sys
from typing import List, Optional

from src.bitengine.engine import BACKENDS, DEFAULT_CHUNK_BITS, DEFAULT_MAX_VARS, HARD_MAX_VARS, max_workers
from src.common.errors import CapExceededError, ScriptError, TBAError
from src.common.observability import setup_observability
from src.countlab.tba import tba_count
from src.modelkit.models import format_model
from src.shell.solver import decode_rows, load_input, solve_input

logger = logging.getLogger(__name__)

DEFAULT_JOBS = os.environ.get("TBA_JOBS", "1")
DEFAULT_OUT = "out.txt"

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CAP = 2


class UsageError(TBAError, ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse that raises instead of exiting with status 2, which is reserved for the cap."""

    def error(self, message):
        raise UsageError(message)


def _jobs(value: str) -> int:
    if value == "max":
        return max_workers()
    try:
        jobs = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer or 'max', got '{value}'") from None
    if jobs < 1:
        raise argparse.ArgumentTypeError("jobs must be at least 1")
    return jobs


def _max_vars(value: str) -> int:
    try:
        cap = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got '{value}'") from None
    if not 0 <= cap <= HARD_MAX_VARS:
        raise argparse.ArgumentTypeError(f"max-vars must lie in 0..{HARD_MAX_VARS}, got {cap}")
    return cap


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--chunk-bits", type=int, default=DEFAULT_CHUNK_BITS, help="log2 of valuations per chunk")
    common.add_argument("--jobs", type=_jobs, default=DEFAULT_JOBS, help="worker count, or 'max' (default: $TBA_JOBS or 1)")
    common.add_argument("--max-vars", type=_max_vars, default=DEFAULT_MAX_VARS, help="feasibility cap on free letters")
    common.add_argument("--backend", choices=sorted(BACKENDS), default="bitparallel", help="naive is the oracle path")
    common.add_argument("--models", action="store_true", help="pretty-print decoded models of theory files")
    common.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG")

    parser = _Parser(prog="tba", description="Find and count finite models by full-DNF evaluation.")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    solve = commands.add_parser("solve", parents=[common], help="solve a script or theory file")
    mode = solve.add_mutually_exclusive_group(required=True)
    mode.add_argument("--all", action="store_true", help="write every solution")
    mode.add_argument("--count", action="store_true", help="print only the model count")
    solve.add_argument("input")
    solve.add_argument("output", nargs="?", default=DEFAULT_OUT)

    tba = commands.add_parser("tba", parents=[common], help="count labeled models and isomorphism types")
    tba.add_argument("theory")
    return parser


def _configure_logging(verbosity: int):
    level = logging.WARNING if verbosity == 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(level=level, format="%(name)s: %(levelname)s - %(message)s", stream=sys.stderr, force=True)


def _engine_options(args, workers: int) -> dict:
    return {
        "backend": args.backend,
        "chunk_bits": args.chunk_bits,
        "workers": workers,
        "max_vars": args.max_vars,
    }


def _run_solve(args) -> int:
    loaded = load_input(args.input)
    options = _engine_options(args, args.jobs)
    options["count_only"] = args.count
    solution = solve_input(loaded, options)
    if args.count:
        print(solution.count)
        return EXIT_OK
    path = solution.write(args.output)
    print(f"{solution.count} solutions written to {path}")
    if args.models and loaded.theory is not None:
        for number, model in enumerate(decode_rows(solution, loaded.theory), start=1):
            print(f"--- model {number}")
            print(format_model(model))
    return EXIT_OK


def _run_tba(args) -> int:
    loaded = load_input(args.theory)
    if loaded.source is None:
        raise ScriptError(f"{args.theory} is not a theory file")
    spec = loaded.source.counting_spec
    if spec is None:
        raise ScriptError(f"{args.theory} declares no partition and no definable constants")
    report = tba_count(
        loaded.theory,
        spec,
        config=_engine_options(args, 1),
        jobs=args.jobs,
        constants_factor=loaded.source.constants_factor,
    )
    sys.stdout.write(report.to_table())
    if args.models:
        for record in report.records:
            for model in record.representatives:
                print(f"--- {record.partition.describe()}")
                print(format_model(model))
    return EXIT_OK


def cli_main(argv: Optional[List[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        logger.error("CLI: ERROR - %s", e)
        return EXIT_ERROR
    _configure_logging(args.verbose)
    setup_observability("tba-cli")

    try:
        if args.command == "solve":
            return _run_solve(args)
        return _run_tba(args)
    except CapExceededError as e:
        logger.error("CLI: ERROR - %s", e)
        return EXIT_CAP
    except (TBAError, OSError) as e:
        logger.error("CLI: ERROR - %s", e)
        return EXIT_ERROR


def main():
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
