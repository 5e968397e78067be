"""Tabular output of simulation reports.

The CSV layout starts with the line ``# dunnettctp-table v1`` followed by
a header row::

    scenario,n1..ng,s1..sg,m2..mg,
    D1,D1_se,..,D,D_se,N1,..,N,N_se,C1,..,C,C_se,W1,..,W,W_se,
    D_fwer,D_fwer_se,..,W_fwer,W_fwer_se,runs,failures

where ``Di`` is the rate of rejecting treatment ``i`` and ``D`` the rate
of rejecting any treatment. Columns of procedures that were not run are
left empty.
"""

from __future__ import annotations

import io
import math
from pathlib import Path
from typing import Dict, List, Sequence, Tuple, Union

import pandas as pd

from .closure import ClosureMethod
from .errors import ReportSchemaError
from .simulation import DEFAULT_METHODS, PowerReport

__all__ = [
    "TABLE_SCHEMA",
    "table_columns",
    "table_frame",
    "emit_table",
    "read_table",
    "method_columns",
]

TABLE_SCHEMA = "# dunnettctp-table v1"


def _design_columns(g: int) -> List[str]:
    return (
        [f"n{i}" for i in range(1, g + 1)]
        + [f"s{i}" for i in range(1, g + 1)]
        + [f"m{i}" for i in range(2, g + 1)]
    )


def _rate_columns(k: int) -> List[str]:
    columns = []
    for method in DEFAULT_METHODS:
        code = method.code
        for name in [f"{code}{i}" for i in range(1, k + 1)] + [code]:
            columns.extend([name, f"{name}_se"])
    return columns


def _fwer_columns() -> List[str]:
    columns = []
    for method in DEFAULT_METHODS:
        columns.extend([f"{method.code}_fwer", f"{method.code}_fwer_se"])
    return columns


def table_columns(g: int) -> List[str]:
    """Column names of a table whose largest design has ``g`` groups."""
    return (
        ["scenario"]
        + _design_columns(g)
        + _rate_columns(g - 1)
        + _fwer_columns()
        + ["runs", "failures"]
    )


def _row(report: PowerReport) -> Dict[str, object]:
    scenario = report.scenario
    row: Dict[str, object] = {"scenario": scenario.name}
    for i, (n, sd) in enumerate(zip(scenario.n, scenario.sd), start=1):
        row[f"n{i}"] = n
        row[f"s{i}"] = sd
    for i, mu in enumerate(scenario.mu[1:], start=2):
        row[f"m{i}"] = mu
    for rates in report.methods:
        code = rates.method.code
        for i, (rate, se) in enumerate(
            zip(rates.per_pair, rates.per_pair_se), start=1
        ):
            row[f"{code}{i}"] = rate
            row[f"{code}{i}_se"] = se
        row[code] = rates.any_pair
        row[f"{code}_se"] = rates.any_pair_se
        row[f"{code}_fwer"] = rates.fwer
        row[f"{code}_fwer_se"] = rates.fwer_se
    row["runs"] = report.runs
    row["failures"] = report.failures
    return row


def table_frame(reports: Sequence[PowerReport]) -> pd.DataFrame:
    """Collect reports into a frame with the documented column order."""
    g = max((len(r.scenario.n) for r in reports), default=4)
    columns = table_columns(g)
    frame = pd.DataFrame([_row(r) for r in reports], columns=columns)
    integer_columns = [f"n{i}" for i in range(1, g + 1)] + [
        "runs",
        "failures",
    ]
    frame[integer_columns] = frame[integer_columns].astype("Int64")
    rate_columns = [
        c for c in columns if c not in integer_columns and c != "scenario"
    ]
    frame[rate_columns] = frame[rate_columns].astype(float)
    return frame


def _format_text(frame: pd.DataFrame) -> str:
    text = pd.DataFrame(index=frame.index)
    for column in frame.columns:
        if column.endswith("_se"):
            continue
        values = frame[column]
        if column == "scenario" or str(values.dtype) == "Int64":
            text[column] = [
                "" if pd.isna(v) else str(v) for v in values.tolist()
            ]
        elif column[0] in "sm" and column[1:].isdigit():
            text[column] = [
                "" if math.isnan(v) else f"{v:g}" for v in values.tolist()
            ]
        else:
            text[column] = [
                "" if math.isnan(v) else f"{v:.3f}" for v in values.tolist()
            ]
    return text.to_string(index=False)


def emit_table(
    reports: Sequence[PowerReport], *, full_precision: bool = False
) -> Tuple[str, str]:
    """Render reports as a CSV document and a fixed-width text table.

    Parameters
    ----------
    reports : sequence of `PowerReport`
        One table row per report.
    full_precision : `bool`
        Write CSV floats with full round-trip precision instead of six
        significant digits.

    Returns
    -------
    csv : `str`
        The CSV document, schema line first.
    text : `str`
        The text table; rates with three decimals, no standard errors.
    """
    frame = table_frame(reports)
    buffer = io.StringIO()
    buffer.write(TABLE_SCHEMA + "\n")
    frame.to_csv(
        buffer,
        index=False,
        float_format=None if full_precision else "%.6g",
        lineterminator="\n",
    )
    return buffer.getvalue(), _format_text(frame) + "\n"


def read_table(source: Union[str, Path]) -> pd.DataFrame:
    """Read a table written by `emit_table` from a path or CSV text.

    Raises
    ------
    dunnettctp.errors.ReportSchemaError
        Raised if the schema line is missing.
    """
    if isinstance(source, Path):
        source = source.read_text()
    first, _, rest = source.partition("\n")
    if first.strip() != TABLE_SCHEMA:
        raise ReportSchemaError(f"not a dunnettctp table: {first[:40]!r}")
    return pd.read_csv(io.StringIO(rest))


def method_columns(method: ClosureMethod, k: int) -> List[str]:
    """Per-pair and any-pair rate columns of one procedure."""
    code = method.code
    return [f"{code}{i}" for i in range(1, k + 1)] + [code]
