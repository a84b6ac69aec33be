"""asymptotics: table of limit constants and optimal k per kernel."""

import argparse
import sys

import pandas as pd

from tailkernel.asymptotics import (
    AsymptoticContext,
    mean_bias_constant,
    optimal_k_kernel,
    sigma2,
    sigma2_star,
)
from tailkernel.config import DESK_SAMPLE_SIZE, EXIT_OK
from tailkernel.csvio import write_csv
from tailkernel.errors import DomainError, NoOptimumError, SingularityError, ValidationError
from tailkernel.kernels import bias_ratio_g, get_kernel, phi_optimal, variance_ratio_h
from tailkernel.models import CensoringScheme, Family, ParetoTypeModel

COMMANDS = [
    ("asymptotics", "Asymptotic variance, bias and optimal k for a censoring scheme"),
]

TABLE_COLUMNS = ["kernel", "p", "sigma2", "m_k", "sigma2_star", "g", "h", "phi",
                 "k_star", "k_star_printed"]

# Markers for cells that have no value
INVALID = "invalid"       # p <= 1/2
NO_OPTIMUM = "none"       # no second-order bias
SINGULAR = "singular"     # rho(tau1) singular


def _model(family: str, gamma: float, zeta: float) -> ParetoTypeModel:
    fam = Family(family)
    return ParetoTypeModel(fam, gamma, zeta if fam is Family.BURR else 1.0)


def _cell(fn, *args):
    try:
        return fn(*args)
    except NoOptimumError:
        return NO_OPTIMUM
    except SingularityError:
        return SINGULAR
    except DomainError:
        return INVALID


def asymptotics_table(scheme: CensoringScheme, kernels: list[str], n: int) -> pd.DataFrame:
    """One row of constants per kernel."""
    ctx = AsymptoticContext.from_scheme(scheme)
    t = ctx.hall_F.beta * ctx.gamma1
    rows = []
    for name in kernels:
        kernel = get_kernel(name)
        opt = _cell(optimal_k_kernel, kernel, ctx, n)
        rows.append({
            "kernel": name,
            "p": ctx.p,
            "sigma2": _cell(sigma2, kernel, ctx),
            "m_k": mean_bias_constant(kernel, ctx),
            "sigma2_star": _cell(sigma2_star, kernel, ctx),
            "g": _cell(bias_ratio_g, kernel, t),
            "h": _cell(variance_ratio_h, kernel, ctx.p),
            "phi": _cell(phi_optimal, kernel, ctx.p, ctx.alpha),
            "k_star": opt.k if not isinstance(opt, str) else opt,
            "k_star_printed": opt.printed_k if not isinstance(opt, str) else opt,
        })
    return pd.DataFrame(rows, columns=TABLE_COLUMNS)


def cmd_asymptotics(args: argparse.Namespace) -> int:
    """Print the constants table as CSV."""
    try:
        f_model = _model(args.family_f, args.gamma_f, args.zeta_f)
        g_model = None if args.uncensored else _model(args.family_g, args.gamma_g, args.zeta_g)
    except DomainError as exc:
        raise ValidationError(str(exc)) from None
    if args.n < 3:
        raise ValidationError("n must be at least 3")
    table = asymptotics_table(CensoringScheme(f_model, g_model),
                              args.kernel or ["indicator", "biweight", "triweight", "quadweight"],
                              args.n)
    write_csv(table, sys.stdout)
    return EXIT_OK


def register(sub: argparse._SubParsersAction) -> None:
    """Add the asymptotics subparser."""
    families = [f.value for f in Family]
    p = sub.add_parser("asymptotics", help=COMMANDS[0][1])
    p.add_argument("--family-f", default="burr", choices=families)
    p.add_argument("--gamma-f", type=float, default=0.5)
    p.add_argument("--zeta-f", type=float, default=1.0)
    p.add_argument("--family-g", default="burr", choices=families)
    p.add_argument("--gamma-g", type=float, default=1.0)
    p.add_argument("--zeta-g", type=float, default=1.0)
    p.add_argument("--uncensored", action="store_true")
    p.add_argument("--kernel", action="append",
                   choices=["indicator", "biweight", "triweight", "quadweight"],
                   help="kernel id (repeatable, default: all four)")
    p.add_argument("--n", type=int, default=DESK_SAMPLE_SIZE, help="sample size for k*")
    p.set_defaults(handler=cmd_asymptotics)
