"""The ``tree`` subcommand: DOT decision trees from an analysis report."""

from __future__ import annotations

import argparse
import logging
from pathlib import Path
from typing import Any, List, Optional, Sequence

from ..closure import ClosureMethod, ClosureResult
from ..errors import ConfigurationError, ReportSchemaError
from ..reports import load_report
from ..tree import export_tree
from . import parse_methods, write_output

__all__ = ["add_parser", "run", "write_trees", "tree_path", "closed_tests"]


def add_parser(subparsers: Any, common: argparse.ArgumentParser) -> None:
    parser = subparsers.add_parser(
        "tree",
        parents=[common],
        help="Export closed-testing decision trees as DOT.",
        description=(
            "Draw the hypothesis lattice of each closed-testing procedure "
            "in an analysis report. With --out, one tree-<method>.dot "
            "file per procedure is written to that directory."
        ),
    )
    parser.add_argument("report", help="Analysis JSON written by analyze.")
    parser.set_defaults(handler=run)


def tree_path(directory: Path, method: ClosureMethod) -> Path:
    return directory / f"tree-{method.value}.dot"


def write_trees(
    results: Sequence[ClosureResult],
    directory: Path,
    alpha: Optional[float] = None,
) -> List[Path]:
    """Write one DOT file per closed-testing result into ``directory``."""
    try:
        directory.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise ConfigurationError(f"cannot create {directory}: {e.strerror}")
    paths = []
    for result in results:
        path = tree_path(directory, result.method)
        path.write_text(export_tree(result, alpha))
        paths.append(path)
    return paths


def closed_tests(results: Sequence[ClosureResult]) -> List[ClosureResult]:
    return [r for r in results if r.method is not ClosureMethod.DUNNETT]


def run(args: argparse.Namespace, *, logger: logging.Logger) -> int:
    try:
        text = Path(args.report).read_text()
    except OSError as e:
        raise ConfigurationError(f"cannot read {args.report}: {e.strerror}")
    report = load_report(text)
    results = closed_tests(
        [ClosureResult.from_dict(entry) for entry in report["methods"]]
    )
    if args.method:
        wanted = parse_methods(args.method)
        missing = [
            m.value
            for m in wanted
            if m is not ClosureMethod.DUNNETT
            and all(r.method is not m for r in results)
        ]
        if missing:
            raise ConfigurationError(
                f"report has no result for {', '.join(missing)}"
            )
        results = [r for r in results if r.method in wanted]
    if not results:
        raise ReportSchemaError("report holds no closed-testing result")

    if args.out is None:
        write_output(
            "".join(export_tree(r, args.alpha) for r in results), None
        )
        return 0
    for path in write_trees(results, Path(args.out), args.alpha):
        logger.info("Wrote %s", path)
    return 0
