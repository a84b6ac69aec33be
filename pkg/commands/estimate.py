"""estimate: estimator paths for a censored data file."""

import argparse
import sys
from pathlib import Path

import numpy as np

from tailkernel.asymptotics import asymptotic_interval
from tailkernel.config import EXIT_OK
from tailkernel.csvio import path_frame, read_data_file, write_csv
from tailkernel.errors import DomainError, ValidationError
from tailkernel.estimators import EstimatorId, EstimatorSpec, estimator_path
from tailkernel.kernels import INDICATOR
from tailkernel.logging_setup import logger
from tailkernel.survival import OrderedCensoredSample

COMMANDS = [
    ("estimate", "Estimator paths over k for a z,delta data file"),
]

_INTERVAL_ESTIMATORS = (EstimatorId.KERNEL, EstimatorId.WORMS)


def _k_grid(args: argparse.Namespace, n: int) -> list[int]:
    if args.k:
        return sorted(set(args.k))
    k_min = args.k_min if args.k_min is not None else 2
    k_max = args.k_max if args.k_max is not None else n - 1
    if not 2 <= k_min <= k_max <= n - 1:
        raise ValidationError(f"need 2 <= k-min <= k-max <= n-1 = {n - 1}")
    return list(range(k_min, k_max + 1, args.k_step))


def cmd_estimate(args: argparse.Namespace) -> int:
    """Compute each requested estimator over the k grid and print the path CSV."""
    sample = OrderedCensoredSample.from_sample(read_data_file(args.input))
    if args.k_step < 1:
        raise ValidationError("k-step must be at least 1")
    ks = _k_grid(args, sample.n)
    try:
        specs = [
            EstimatorSpec.from_names(name, args.kernel, args.bab_kernel, args.variant,
                                     args.beta1, args.adaptive)
            for name in (args.estimator or ["kernel"])
        ]
    except DomainError as exc:
        raise ValidationError(str(exc)) from None
    if args.level is not None and not 0 < args.level < 1:
        raise ValidationError("level must lie in (0, 1)")

    paths = [estimator_path(sample, spec, ks) for spec in specs]
    intervals = None
    if args.level is not None:
        intervals = {}
        for pos, (spec, path) in enumerate(zip(specs, paths)):
            if spec.estimator not in _INTERVAL_ESTIMATORS:
                continue
            kernel = INDICATOR if spec.estimator is EstimatorId.WORMS else spec.kernel
            lower = np.full(path.k_values.size, np.nan)
            upper = np.full(path.k_values.size, np.nan)
            for i, k in enumerate(path.k_values):
                if 2 <= k <= sample.n - 1:
                    iv = asymptotic_interval(sample, int(k), kernel, args.level)
                    lower[i], upper[i] = iv.lower, iv.upper
            intervals[pos] = (lower, upper)

    logger.info("estimate: n=%d, %d estimator(s), %d values of k", sample.n, len(specs), len(ks))
    write_csv(path_frame(paths, intervals), sys.stdout)
    return EXIT_OK


def register(sub: argparse._SubParsersAction) -> None:
    """Add the estimate subparser."""
    p = sub.add_parser("estimate", help=COMMANDS[0][1])
    p.add_argument("input", type=Path, help="CSV file with header z,delta")
    p.add_argument("--estimator", action="append",
                   choices=[e.value for e in EstimatorId],
                   help="estimator id (repeatable, default: kernel)")
    p.add_argument("--kernel", default="triweight",
                   choices=["indicator", "biweight", "triweight", "quadweight"])
    p.add_argument("--bab-kernel", default="bab2", choices=["bab0", "bab1", "bab2"])
    p.add_argument("--variant", default="shifted", choices=["shifted", "unshifted"])
    p.add_argument("--k", type=int, action="append", help="single k (repeatable)")
    p.add_argument("--k-min", type=int, default=None)
    p.add_argument("--k-max", type=int, default=None)
    p.add_argument("--k-step", type=int, default=1)
    p.add_argument("--beta1", type=float, default=None,
                   help="known second-order parameter for bias-reduced")
    p.add_argument("--adaptive", action="store_true",
                   help="choose tau1 from the adaptive grid for bias-reduced")
    p.add_argument("--level", type=float, default=None,
                   help="add lower/upper plug-in interval columns at this level")
    p.set_defaults(handler=cmd_estimate)
