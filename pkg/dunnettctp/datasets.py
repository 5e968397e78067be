"""Reading datasets from CSV files."""

from __future__ import annotations

import logging
import math
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Union

import pandas as pd

from .design import Dataset, GroupSummary
from .errors import DatasetError

__all__ = ["load_csv", "group_order", "summary_frame"]

logger = logging.getLogger(__name__)


def _as_int(value: str) -> Optional[int]:
    try:
        number = int(value)
    except ValueError:
        return None
    return number if number >= 0 else None


def group_order(
    values: Sequence[str], control_label: Optional[str] = None
) -> List[str]:
    """Order the distinct group labels with the control first.

    Nonnegative integer labels without a control label keep their numeric
    order, so label ``0`` is the control. Integer labels with a control
    label put the control first and the rest in numeric order. Other
    labels follow the control in order of first appearance.

    Raises
    ------
    dunnettctp.errors.DatasetError
        Raised if the control label does not occur, or if non-integer
        labels are given without a control label.
    """
    distinct = list(dict.fromkeys(values))
    numeric = all(_as_int(v) is not None for v in distinct)
    if control_label is not None and control_label not in distinct:
        raise DatasetError(f"control label {control_label!r} not found")
    if numeric:
        ordered = sorted(distinct, key=lambda v: int(v))
        if control_label is None:
            return ordered
        return [control_label] + [v for v in ordered if v != control_label]
    if control_label is None:
        raise DatasetError(
            "group labels are not integers; name the control group"
        )
    return [control_label] + [v for v in distinct if v != control_label]


def load_csv(
    path: Union[str, Path],
    group_column: str = "group",
    response_column: str = "response",
    block_column: Optional[str] = None,
    control_label: Optional[str] = None,
) -> Dataset:
    """Load a dataset from a CSV file with a header row.

    Parameters
    ----------
    path : `str` or `pathlib.Path`
        The CSV file (UTF-8, comma separated).
    group_column : `str`
        Column holding the group labels.
    response_column : `str`
        Column holding the responses.
    block_column : `str`, optional
        Column holding an additive block factor.
    control_label : `str`, optional
        Label of the control group; see `group_order`.

    Raises
    ------
    dunnettctp.errors.DatasetError
        Raised if the file cannot be read, a column is missing or a value
        cannot be parsed.
    """
    try:
        frame = pd.read_csv(
            path, dtype=str, keep_default_na=False, encoding="utf-8"
        )
    except (OSError, UnicodeDecodeError, pd.errors.ParserError) as e:
        raise DatasetError(f"cannot read {path}: {e}")
    except pd.errors.EmptyDataError:
        raise DatasetError(f"{path} is empty")

    frame.columns = [str(c).strip() for c in frame.columns]
    required = [group_column, response_column]
    if block_column is not None:
        required.append(block_column)
    for column in required:
        if column not in frame.columns:
            raise DatasetError(f"missing column {column!r} in {path}")

    labels = [v.strip() for v in frame[group_column]]
    for row, label in enumerate(labels, start=2):
        if not label:
            raise DatasetError(f"line {row}: empty group label")
    ordered = group_order(labels, control_label)
    index: Dict[str, int] = {label: i for i, label in enumerate(ordered)}

    responses = []
    for row, raw in enumerate(frame[response_column], start=2):
        try:
            value = float(raw)
        except ValueError:
            raise DatasetError(
                f"line {row}: response {raw!r} is not a number"
            )
        if not math.isfinite(value):
            raise DatasetError(f"line {row}: response {raw!r} is not finite")
        responses.append(value)

    blocks = None
    if block_column is not None:
        blocks = [v.strip() for v in frame[block_column]]
        for row, level in enumerate(blocks, start=2):
            if not level:
                raise DatasetError(f"line {row}: empty block level")

    logger.debug(
        "Loaded %d records in %d groups from %s",
        len(responses),
        len(ordered),
        path,
    )
    return Dataset.from_arrays(
        [index[label] for label in labels],
        responses,
        blocks=blocks,
        labels=ordered,
    )


def summary_frame(summaries: Sequence[GroupSummary]) -> pd.DataFrame:
    """Per-group summaries as a frame with columns
    ``group,label,n,mean,sd,sd_defined``.
    """
    return pd.DataFrame(
        [
            {
                "group": s.group,
                "label": s.label,
                "n": s.n,
                "mean": s.mean,
                "sd": s.sd,
                "sd_defined": s.sd_defined,
            }
            for s in summaries
        ],
        columns=["group", "label", "n", "mean", "sd", "sd_defined"],
    )
