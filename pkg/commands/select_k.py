"""select-k: Reiss-Thomas choice of k from an estimator path CSV."""

import argparse
import sys
from pathlib import Path

import pandas as pd

from tailkernel.config import DEFAULT_K_MIN, DEFAULT_NU, EXIT_OK
from tailkernel.csvio import read_path_csv, write_csv
from tailkernel.errors import ValidationError
from tailkernel.selection import reiss_thomas

COMMANDS = [
    ("select-k", "Pick k by the Reiss-Thomas criterion from a path CSV"),
]

RESULT_COLUMNS = ["estimator", "kernel", "k_star", "estimate", "criterion", "nu"]


def cmd_select_k(args: argparse.Namespace) -> int:
    """Print one SelectionResult row per path in the input."""
    if not args.input.is_file():
        raise ValidationError(f"{args.input}: file not found")
    if not 0.0 <= args.nu <= 0.5:
        raise ValidationError("nu must lie in [0, 1/2]")
    rows = []
    for path in read_path_csv(args.input, args.estimator):
        result = reiss_thomas(path, args.nu, args.k_min, args.k_max)
        best = int(result.k_values.searchsorted(result.k_star))
        rows.append({
            "estimator": path.estimator,
            "kernel": path.kernel,
            "k_star": result.k_star,
            "estimate": result.estimate,
            "criterion": float(result.criterion_values[best]),
            "nu": result.nu,
        })
    write_csv(pd.DataFrame(rows, columns=RESULT_COLUMNS), sys.stdout)
    return EXIT_OK


def register(sub: argparse._SubParsersAction) -> None:
    """Add the select-k subparser."""
    p = sub.add_parser("select-k", help=COMMANDS[0][1])
    p.add_argument("input", type=Path, help="path CSV as written by `estimate`")
    p.add_argument("--estimator", default=None, help="only paths of this estimator")
    p.add_argument("--nu", type=float, default=DEFAULT_NU)
    p.add_argument("--k-min", type=int, default=DEFAULT_K_MIN)
    p.add_argument("--k-max", type=int, default=None)
    p.set_defaults(handler=cmd_select_k)
