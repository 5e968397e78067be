"""The ``dunnettctp`` command-line interface."""

from __future__ import annotations

import argparse
import logging
import sys
from typing import Optional, Sequence

from . import config
from .commands import (
    DEFAULT_ALPHA,
    analyze,
    positive_float,
    positive_int,
    probability,
    simulate,
    summary,
    tree,
)
from .errors import DunnettCtpError
from .marginal import Sidedness
from .version import __version__

__all__ = ["main", "build_parser"]

logger = logging.getLogger("dunnettctp")


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--alpha",
        type=probability,
        default=None,
        help=f"Test level (default {DEFAULT_ALPHA}).",
    )
    common.add_argument(
        "--side",
        type=Sidedness.parse,
        default=None,
        help="greater, less or two-sided (default).",
    )
    common.add_argument(
        "--method",
        action="append",
        help=(
            "dunnett, ctp-f, ctp-du, ctp-gm or all; repeat or separate "
            "with commas."
        ),
    )
    common.add_argument(
        "--seed",
        type=int,
        default=None,
        help=f"Master seed (default {config.seed}).",
    )
    common.add_argument(
        "--accuracy",
        type=positive_float,
        default=None,
        help="Absolute accuracy of multivariate t probabilities.",
    )
    common.add_argument("--control-label", default=None)
    common.add_argument("--block-column", default=None)
    common.add_argument(
        "--format", choices=["json", "csv", "text"], default=None
    )
    common.add_argument("--out", default=None, help="Output path.")
    common.add_argument(
        "--threads",
        type=positive_int,
        default=config.threads,
        help="Worker count; does not change results.",
    )
    common.add_argument("--verbose", "-v", action="store_true")
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dunnettctp",
        description=(
            "Many-to-one comparisons with Dunnett's test and closed "
            "testing procedures."
        ),
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    common = _common_options()
    for module in (analyze, simulate, tree, summary):
        module.add_parser(subparsers, common)
    return parser


def _configure_logging(verbose: bool, command: str) -> None:
    if verbose:
        level = logging.DEBUG
    elif command == "simulate":
        level = logging.INFO
    else:
        level = logging.WARNING
    logging.basicConfig(
        level=level,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    logger.setLevel(level)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run the command line; returns the process exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(args.verbose, args.command)
    try:
        return args.handler(args, logger=logger.getChild(args.command))
    except DunnettCtpError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    except Exception as e:
        logger.debug("Unexpected failure", exc_info=True)
        print(f"error: unexpected {type(e).__name__}: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
