"""The ``simulate`` subcommand: Monte Carlo power tables."""

from __future__ import annotations

import argparse
import logging
from dataclasses import replace
from typing import Any, List

from ..scenarios import (
    Scenario,
    bundled_table6,
    derived_seed,
    scenario_table,
)
from ..simulation import DEFAULT_METHODS, PowerReport, simulate
from ..tables import emit_table
from . import parse_methods, positive_int, write_output

__all__ = ["add_parser", "run", "select_scenarios"]


def add_parser(subparsers: Any, common: argparse.ArgumentParser) -> None:
    parser = subparsers.add_parser(
        "simulate",
        parents=[common],
        help="Estimate error rates and power by simulation.",
        description=(
            "Run every scenario of a YAML configuration (by default the "
            "bundled 49-design power study). The CSV table goes to --out, "
            "the text table to stdout."
        ),
    )
    parser.add_argument(
        "config", nargs="?", default=None, help="Scenario YAML file."
    )
    parser.add_argument(
        "--runs",
        type=positive_int,
        default=None,
        help="Override the run count of every scenario.",
    )
    parser.add_argument(
        "--scenario",
        action="append",
        default=None,
        help="Only run the named scenarios; may be repeated.",
    )
    parser.add_argument(
        "--full-precision",
        action="store_true",
        help="Write CSV rates without rounding.",
    )
    parser.set_defaults(handler=run)


def select_scenarios(args: argparse.Namespace) -> List[Scenario]:
    """Scenarios of the run with the command-line overrides applied.

    A ``--seed`` re-derives every scenario seed from that master seed by
    position in the file.
    """
    if args.config is None:
        scenarios = bundled_table6()
    else:
        scenarios = scenario_table(args.config)
    if args.seed is not None:
        scenarios = [
            replace(s, seed=derived_seed(args.seed, index))
            for index, s in enumerate(scenarios)
        ]
    if args.alpha is not None:
        scenarios = [replace(s, alpha=args.alpha) for s in scenarios]
    if args.side is not None:
        scenarios = [replace(s, side=args.side) for s in scenarios]
    if args.runs is not None:
        scenarios = [s.with_runs(args.runs) for s in scenarios]
    if args.scenario:
        wanted = set(args.scenario)
        scenarios = [s for s in scenarios if s.name in wanted]
    return scenarios


def run(args: argparse.Namespace, *, logger: logging.Logger) -> int:
    methods = parse_methods(args.method, default=DEFAULT_METHODS)
    scenarios = select_scenarios(args)
    if not scenarios:
        logger.warning("No scenario to run")

    reports: List[PowerReport] = []
    for index, scenario in enumerate(scenarios, start=1):
        logger.info(
            "Scenario %d/%d: %s (%d runs)",
            index,
            len(scenarios),
            scenario.name,
            scenario.runs,
        )
        reports.append(
            simulate(
                scenario,
                methods,
                accuracy=args.accuracy,
                workers=args.threads,
                logger=logger,
            )
        )

    csv, text = emit_table(reports, full_precision=args.full_precision)
    if args.out is not None:
        write_output(csv, args.out)
        logger.info("Wrote %s", args.out)
    write_output(csv if args.format == "csv" else text, None)
    return 0
