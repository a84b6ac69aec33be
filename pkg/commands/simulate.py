"""simulate: Monte-Carlo study driven by a key=value run config."""

import argparse
import sys
from dataclasses import replace
from pathlib import Path

import pandas as pd

from tailkernel.config import EXIT_OK, load_run_config, resolve_threads
from tailkernel.csvio import write_csv, write_scenario_files
from tailkernel.errors import ValidationError
from tailkernel.logging_setup import logger, runs_logger
from tailkernel.montecarlo import run_scenario, scenarios_from_run_config

COMMANDS = [
    ("simulate", "Run the simulation study described by a config file"),
]


def cmd_simulate(args: argparse.Namespace) -> int:
    """Run every scenario, write its CSVs and print the Reiss-Thomas table."""
    cfg = load_run_config(args.config)
    if args.seed is not None:
        if not 0 <= args.seed < 2 ** 64:
            raise ValidationError("seed: must be a 64-bit unsigned integer")
        cfg = replace(cfg, seed=args.seed)
    threads = resolve_threads(args.threads if args.threads is not None else cfg.threads)
    scenarios = scenarios_from_run_config(cfg)

    tables = []
    for scenario in scenarios:
        logger.info("Scenario %s: %s, n=%d, R=%d", scenario.name, scenario.scheme.label(),
                    scenario.n, scenario.replications)
        summary = run_scenario(scenario, threads)
        written = write_scenario_files(summary, args.output_dir)
        runs_logger.info("scenario %s wrote %s", scenario.name,
                         ", ".join(p.name for p in written))
        tables.append(summary.selection_table())

    write_csv(pd.concat(tables, ignore_index=True), sys.stdout)
    return EXIT_OK


def register(sub: argparse._SubParsersAction) -> None:
    """Add the simulate subparser."""
    p = sub.add_parser("simulate", help=COMMANDS[0][1])
    p.add_argument("config", type=Path, help="key=value run config")
    p.set_defaults(handler=cmd_simulate)
