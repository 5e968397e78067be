"""The ``summary`` subcommand: per-group descriptive statistics."""

from __future__ import annotations

import argparse
import io
import json
import logging
from typing import Any

from ..datasets import summary_frame
from ..design import summarize
from ..reports import round_floats
from . import add_dataset_arguments, load_dataset, write_output

__all__ = ["add_parser", "run"]


def add_parser(subparsers: Any, common: argparse.ArgumentParser) -> None:
    parser = subparsers.add_parser(
        "summary",
        parents=[common],
        help="Per-group sample size, mean and standard deviation.",
    )
    add_dataset_arguments(parser)
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace, *, logger: logging.Logger) -> int:
    data = load_dataset(args)
    frame = summary_frame(summarize(data))
    empty = data.n_groups - len(frame)
    if empty:
        logger.warning("%d groups have no observations", empty)

    fmt = args.format or "csv"
    if fmt == "csv":
        buffer = io.StringIO()
        frame.to_csv(
            buffer, index=False, float_format="%.6g", lineterminator="\n"
        )
        text = buffer.getvalue()
    elif fmt == "json":
        records = [
            {key: _plain(value) for key, value in row.items()}
            for row in frame.to_dict(orient="records")
        ]
        text = json.dumps(round_floats(records), indent=2) + "\n"
    else:
        text = frame.to_string(index=False) + "\n"
    write_output(text, args.out)
    return 0


def _plain(value: Any) -> Any:
    return value.item() if hasattr(value, "item") else value
