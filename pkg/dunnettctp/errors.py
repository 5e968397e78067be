"""Exception hierarchy for dunnettctp.

Every exception carries an ``exit_code`` that the command-line interface
reports when the exception escapes a subcommand.
"""

from __future__ import annotations

from typing import Optional

__all__ = [
    "DunnettCtpError",
    "DataError",
    "DatasetError",
    "EmptyGroupError",
    "ZeroResidualDfError",
    "RankDeficientError",
    "ContrastError",
    "EmptySubsetError",
    "IndexOutOfRangeError",
    "TooManyGroupsError",
    "ConfigurationError",
    "ScenarioParseError",
    "ReportSchemaError",
    "NumericError",
    "NotPSDError",
    "DegenerateContrastError",
    "AccuracyNotReachedError",
    "DomainError",
]


class DunnettCtpError(Exception):
    """Base class for all errors raised by dunnettctp."""

    exit_code = 1


class DataError(DunnettCtpError):
    """The input data cannot be analyzed as given."""

    exit_code = 2


class DatasetError(DataError):
    """A dataset file or record is malformed (missing column, bad value)."""


class EmptyGroupError(DataError):
    """A group index between 0 and k has no observations."""

    def __init__(self, group: int) -> None:
        super().__init__(f"group {group} has no observations")
        self.group = group


class ZeroResidualDfError(DataError):
    """The fit leaves no residual degrees of freedom."""


class RankDeficientError(DataError):
    """The design matrix is not of full column rank."""


class ContrastError(DataError):
    """A contrast matrix cannot be built for the requested comparison."""


class EmptySubsetError(ContrastError):
    """The active subset of treatments is empty."""


class IndexOutOfRangeError(ContrastError, IndexError):
    """A treatment index lies outside ``1..g-1``."""


class TooManyGroupsError(DataError):
    """The closure lattice would be too large to enumerate."""


class ConfigurationError(DunnettCtpError):
    """Invalid options or configuration files."""

    exit_code = 2


class ScenarioParseError(ConfigurationError):
    """A scenario configuration file is malformed.

    Parameters
    ----------
    message : `str`
        Description of the problem.
    line : `int`, optional
        1-based line number in the configuration file.
    field : `str`, optional
        Name of the offending field.
    """

    def __init__(
        self,
        message: str,
        *,
        line: Optional[int] = None,
        field: Optional[str] = None,
    ) -> None:
        location = []
        if line is not None:
            location.append(f"line {line}")
        if field is not None:
            location.append(f"field '{field}'")
        prefix = f"{', '.join(location)}: " if location else ""
        super().__init__(f"{prefix}{message}")
        self.line = line
        self.field = field


class ReportSchemaError(ConfigurationError):
    """An analysis report does not follow the expected schema."""


class NumericError(DunnettCtpError):
    """A numerical computation failed."""

    exit_code = 3


class NotPSDError(NumericError):
    """A correlation matrix is not positive semidefinite, even after
    repair.
    """


class DegenerateContrastError(NumericError):
    """A contrast has zero variance under the fitted model."""


class AccuracyNotReachedError(NumericError):
    """The integration sample cap was hit before reaching the requested
    accuracy.
    """


class DomainError(NumericError, ValueError):
    """A distribution parameter is outside its domain."""
