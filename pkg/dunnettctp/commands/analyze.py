"""The ``analyze`` subcommand: adjusted p-values of a dataset."""

from __future__ import annotations

import argparse
import io
import logging
from pathlib import Path
from typing import Any, Optional, Sequence

import pandas as pd

from .. import config
from ..closure import ClosureResult, run_closure
from ..contrasts import load_contrasts
from ..design import fit
from ..marginal import (
    DenominatorScope,
    ElementaryMode,
    Sidedness,
    TestResult,
    mct_maxtest,
)
from ..reports import analysis_report, closure_results, dump_report
from . import (
    DEFAULT_ALPHA,
    add_dataset_arguments,
    load_dataset,
    parse_methods,
    write_output,
)
from .tree import closed_tests, write_trees

__all__ = ["add_parser", "run", "adjusted_frame"]


def add_parser(subparsers: Any, common: argparse.ArgumentParser) -> None:
    parser = subparsers.add_parser(
        "analyze",
        parents=[common],
        help="Compute adjusted p-values for a dataset.",
        description=(
            "Fit the one-way model (or the additive model with "
            "--block-column) and compare every treatment with the "
            "control using the selected procedures."
        ),
    )
    add_dataset_arguments(parser)
    parser.add_argument(
        "--contrasts",
        default=None,
        help="CSV of user contrasts tested with a single-step max-test.",
    )
    parser.add_argument(
        "--elementary-mode",
        choices=[mode.value for mode in ElementaryMode],
        default=ElementaryMode.PAIRWISE_FULL_DF.value,
        help="Single-treatment test of the F-test closure.",
    )
    parser.add_argument(
        "--f-denominator",
        choices=[scope.value for scope in DenominatorScope],
        default=DenominatorScope.SUBSET_REFIT.value,
        help="Residual variance of subset F-tests.",
    )
    parser.add_argument(
        "--emit-tree",
        metavar="DIR",
        default=None,
        help="Also write tree-<method>.dot files into DIR.",
    )
    parser.add_argument(
        "--full-precision",
        action="store_true",
        help="Write CSV p-values without rounding.",
    )
    parser.set_defaults(handler=run)


def adjusted_frame(results: Sequence[ClosureResult]) -> pd.DataFrame:
    """Adjusted p-values as rows of
    ``method,treatment,comparison,p,rejected``.
    """
    rows = [
        {
            "method": result.method.value,
            "treatment": i,
            "comparison": result.comparison(i),
            "p": p,
            "rejected": i in result.rejected,
        }
        for result in results
        for i, p in enumerate(result.adjusted, start=1)
    ]
    return pd.DataFrame(
        rows, columns=["method", "treatment", "comparison", "p", "rejected"]
    )


def _format_text(
    results: Sequence[ClosureResult], custom: Optional[TestResult]
) -> str:
    frame = adjusted_frame(results)
    frame["p"] = [f"{p:.4f}" for p in frame["p"]]
    frame["rejected"] = ["*" if r else "" for r in frame["rejected"]]
    text = frame.to_string(index=False) + "\n"
    if custom is not None:
        text += f"custom max-test: p = {custom.p:.4f}\n"
    return text


def _format_csv(
    results: Sequence[ClosureResult], full_precision: bool
) -> str:
    buffer = io.StringIO()
    adjusted_frame(results).to_csv(
        buffer,
        index=False,
        float_format=None if full_precision else "%.6g",
        lineterminator="\n",
    )
    return buffer.getvalue()


def run(args: argparse.Namespace, *, logger: logging.Logger) -> int:
    methods = parse_methods(args.method)
    alpha = DEFAULT_ALPHA if args.alpha is None else args.alpha
    side = Sidedness.TWO_SIDED if args.side is None else args.side
    seed = config.seed if args.seed is None else args.seed

    data = load_dataset(args)
    model = fit(data)
    logger.debug(
        "Fitted %s model: k=%d, df=%d", model.model, model.k, model.df
    )
    contrasts = None
    if args.contrasts is not None:
        contrasts = load_contrasts(Path(args.contrasts), model.n_groups)

    results = [
        run_closure(
            model,
            method,
            side,
            seed,
            alpha=alpha,
            accuracy=args.accuracy,
            elementary_mode=ElementaryMode(args.elementary_mode),
            denominator=DenominatorScope(args.f_denominator),
            workers=args.threads,
            logger=logger,
        )
        for method in methods
    ]
    custom = None
    if contrasts is not None:
        custom = mct_maxtest(
            contrasts,
            model,
            side,
            seed,
            accuracy=args.accuracy,
            label="custom",
        )

    report = analysis_report(
        data,
        model,
        results,
        seed=seed,
        alpha=alpha,
        side=side,
        source=Path(args.csv).name,
        custom=custom,
        contrasts=contrasts,
    )
    fmt = args.format or "json"
    if fmt == "json":
        text = dump_report(report)
    elif fmt == "csv":
        text = _format_csv(results, args.full_precision)
    else:
        text = _format_text(results, custom)
    write_output(text, args.out)

    if args.emit_tree is not None:
        trees = closed_tests(closure_results(report))
        if not trees:
            logger.warning("No closed-testing procedure selected; no trees")
        for path in write_trees(trees, Path(args.emit_tree)):
            logger.info("Wrote %s", path)
    return 0
