"""Subcommands of the ``dunnettctp`` command line.

Each module provides ``add_parser(subparsers, common)``, which registers
the subcommand and sets its ``handler``, and ``run(args, logger=...)``,
which returns the process exit code.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Iterable, List, Optional, Tuple

from ..closure import ClosureMethod
from ..datasets import load_csv
from ..design import Dataset
from ..errors import ConfigurationError

__all__ = [
    "ALL_METHODS",
    "DEFAULT_ALPHA",
    "parse_methods",
    "write_output",
    "probability",
    "positive_float",
    "positive_int",
    "add_dataset_arguments",
    "load_dataset",
]

ALL_METHODS: Tuple[ClosureMethod, ...] = (
    ClosureMethod.DUNNETT,
    ClosureMethod.CTP_F,
    ClosureMethod.CTP_DU,
    ClosureMethod.CTP_GM,
)


def parse_methods(
    values: Optional[Iterable[str]],
    default: Tuple[ClosureMethod, ...] = ALL_METHODS,
) -> Tuple[ClosureMethod, ...]:
    """Resolve repeated or comma separated ``--method`` values.

    Raises
    ------
    dunnettctp.errors.ConfigurationError
        Raised for an unknown method name.
    """
    if not values:
        return default
    methods: List[ClosureMethod] = []
    for value in values:
        for name in value.split(","):
            name = name.strip().lower()
            if not name:
                continue
            if name == "all":
                candidates: Iterable[ClosureMethod] = ALL_METHODS
            else:
                try:
                    candidates = (ClosureMethod(name),)
                except ValueError:
                    raise ConfigurationError(f"unknown method {name!r}")
            for method in candidates:
                if method not in methods:
                    methods.append(method)
    if not methods:
        raise ConfigurationError("no method selected")
    return tuple(methods)


def write_output(text: str, out: Optional[str]) -> None:
    """Write ``text`` to the ``--out`` path, or to stdout."""
    if out is None:
        sys.stdout.write(text)
        return
    try:
        Path(out).write_text(text)
    except OSError as e:
        raise ConfigurationError(f"cannot write {out}: {e.strerror}")


DEFAULT_ALPHA = 0.05


def probability(value: str) -> float:
    """Argument type for levels strictly between 0 and 1."""
    try:
        number = float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{value!r} is not a number")
    if not 0 < number < 1:
        raise argparse.ArgumentTypeError(f"{value} is not in (0, 1)")
    return number


def positive_float(value: str) -> float:
    try:
        number = float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{value!r} is not a number")
    if not number > 0:
        raise argparse.ArgumentTypeError(f"{value} is not positive")
    return number


def positive_int(value: str) -> int:
    try:
        number = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{value!r} is not an integer")
    if number < 1:
        raise argparse.ArgumentTypeError(f"{value} is not positive")
    return number


def add_dataset_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("csv", help="Dataset CSV with a header row.")
    parser.add_argument("--group-column", default="group")
    parser.add_argument("--response-column", default="response")


def load_dataset(args: argparse.Namespace) -> Dataset:
    """Load the dataset named by the parsed dataset arguments."""
    return load_csv(
        args.csv,
        group_column=args.group_column,
        response_column=args.response_column,
        block_column=args.block_column,
        control_label=args.control_label,
    )
