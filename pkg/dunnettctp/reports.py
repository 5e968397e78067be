"""JSON analysis reports.

A report is a JSON object with the keys ``schema``, ``version``, ``seed``,
``alpha``, ``side``, ``dataset``, ``fit`` and ``methods`` in that order,
plus ``custom`` when a user contrast matrix was tested. Floats are
rounded to six significant digits; non-finite values are written as the
strings ``"inf"``, ``"-inf"`` and ``"nan"``.
"""

from __future__ import annotations

import json
import math
from typing import Any, Dict, List, Optional, Sequence

from .closure import ClosureResult
from .contrasts import ContrastMatrix
from .design import Dataset, ModelFit
from .errors import ReportSchemaError
from .marginal import Sidedness, TestResult

__all__ = [
    "REPORT_SCHEMA",
    "REPORT_VERSION",
    "analysis_report",
    "dump_report",
    "load_report",
    "closure_results",
    "round_floats",
]

REPORT_SCHEMA = "dunnettctp/analysis"

REPORT_VERSION = 1

SIGNIFICANT_DIGITS = 6


def round_floats(value: Any, digits: int = SIGNIFICANT_DIGITS) -> Any:
    """Round every float in a nested structure to ``digits`` significant
    digits.
    """
    if isinstance(value, bool):
        return value
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return float(f"{value:.{digits}g}")
    if isinstance(value, dict):
        return {key: round_floats(v, digits) for key, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [round_floats(v, digits) for v in value]
    return value


def _dataset_summary(data: Dataset, source: str) -> Dict[str, Any]:
    summary: Dict[str, Any] = {
        "source": source,
        "records": len(data.records),
        "groups": list(data.labels[: data.n_groups]),
    }
    if data.has_blocks:
        summary["blocks"] = list(data.block_levels)
    return summary


def analysis_report(
    data: Dataset,
    fit: ModelFit,
    results: Sequence[ClosureResult],
    *,
    seed: int,
    alpha: float,
    side: Sidedness,
    source: str = "",
    custom: Optional[TestResult] = None,
    contrasts: Optional[ContrastMatrix] = None,
) -> Dict[str, Any]:
    """Assemble the analysis report of a dataset."""
    report: Dict[str, Any] = {
        "schema": REPORT_SCHEMA,
        "version": REPORT_VERSION,
        "seed": seed,
        "alpha": alpha,
        "side": side.value,
        "dataset": _dataset_summary(data, source),
        "fit": fit.to_dict(),
        "methods": [result.to_dict() for result in results],
    }
    if custom is not None:
        report["custom"] = {
            "contrasts": contrasts.to_dict() if contrasts else None,
            "test": custom.to_dict(),
        }
    return round_floats(report)


def dump_report(report: Dict[str, Any]) -> str:
    """Serialize a report; equal reports give byte-identical text."""
    return json.dumps(round_floats(report), indent=2) + "\n"


def load_report(text: str) -> Dict[str, Any]:
    """Parse and check a serialized report.

    Raises
    ------
    dunnettctp.errors.ReportSchemaError
        Raised if the text is not a report of a supported version.
    """
    try:
        report = json.loads(text)
    except json.JSONDecodeError as e:
        raise ReportSchemaError(f"report is not valid JSON: {e}")
    if not isinstance(report, dict):
        raise ReportSchemaError("report is not a JSON object")
    if report.get("schema") != REPORT_SCHEMA:
        raise ReportSchemaError(
            f"unexpected report schema {report.get('schema')!r}"
        )
    if report.get("version") != REPORT_VERSION:
        raise ReportSchemaError(
            f"unsupported report version {report.get('version')!r}"
        )
    if not isinstance(report.get("methods"), list):
        raise ReportSchemaError("report has no method list")
    return report


def closure_results(report: Dict[str, Any]) -> List[ClosureResult]:
    """Closure results stored in a report, in report order."""
    return [ClosureResult.from_dict(entry) for entry in report["methods"]]
