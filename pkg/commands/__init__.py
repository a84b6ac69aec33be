"""tailkernel subcommands with modular registration."""

import argparse

from .estimate import register as register_estimate
from .simulate import register as register_simulate
from .asymptotics import register as register_asymptotics
from .select_k import register as register_select_k


def register_all(sub: argparse._SubParsersAction) -> None:
    """Register every subcommand parser."""
    register_estimate(sub)
    register_simulate(sub)
    register_asymptotics(sub)
    register_select_k(sub)


# Collect every command's (name, description) for the help epilog
ALL_COMMANDS: list[tuple[str, str]] = []


def _collect() -> None:
    from .estimate import COMMANDS as est
    from .simulate import COMMANDS as sim
    from .asymptotics import COMMANDS as asy
    from .select_k import COMMANDS as sel
    ALL_COMMANDS.clear()
    ALL_COMMANDS.extend(est)
    ALL_COMMANDS.extend(sim)
    ALL_COMMANDS.extend(asy)
    ALL_COMMANDS.extend(sel)


_collect()
