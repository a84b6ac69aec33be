"""Argument parser, exit-code mapping, main()."""

import argparse
import sys
from pathlib import Path

from tailkernel.config import EXIT_NUMERICAL, EXIT_OK, EXIT_VALIDATION, OUTPUT_DIR
from tailkernel.errors import DomainError, NumericalError, ValidationError
from tailkernel.logging_setup import logger, runs_logger, summarize_params
from commands import ALL_COMMANDS, register_all


def build_parser() -> argparse.ArgumentParser:
    """Top-level parser with the global flags and one subparser per command."""
    parser = argparse.ArgumentParser(
        prog="tailkernel",
        description="Kernel tail-index estimation for randomly right-censored heavy-tailed data.",
        epilog="commands: " + ", ".join(name for name, _ in ALL_COMMANDS),
    )
    parser.add_argument("--seed", type=int, default=None,
                        help="master seed (overrides the run config)")
    parser.add_argument("--output-dir", type=Path, default=OUTPUT_DIR,
                        help="directory for simulation CSVs (default: %(default)s)")
    parser.add_argument("--threads", type=int, default=None,
                        help="worker threads for replications, 0 = one per CPU")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)
    register_all(sub)
    return parser


def main(argv: list[str] | None = None) -> int:
    """Run one command and return its exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)
    params = {k: v for k, v in vars(args).items() if k != "handler"}
    runs_logger.info("%s: %s", args.command, summarize_params(params))

    try:
        code = args.handler(args)
    except (ValidationError, DomainError, OSError) as exc:
        print(f"tailkernel {args.command}: {exc}", file=sys.stderr)
        runs_logger.warning("%s rejected: %s", args.command, exc)
        return EXIT_VALIDATION
    except NumericalError as exc:
        print(f"tailkernel {args.command}: numerical failure: {exc}", file=sys.stderr)
        runs_logger.error("%s failed: %s", args.command, exc)
        logger.debug("numerical failure", exc_info=True)
        return EXIT_NUMERICAL

    runs_logger.info("%s finished with exit code %d", args.command, code)
    return code if code is not None else EXIT_OK
