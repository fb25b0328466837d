from __future__ import annotations

from typing import Optional


class AdfcmError(ValueError):
    """Base error; `exit_code` is what the CLI returns for it."""

    exit_code = 3


# -----------------------------
# Usage / configuration (exit 2)
# -----------------------------
class ConfigError(AdfcmError):
    exit_code = 2


class InvalidConfig(ConfigError):
    pass


# -----------------------------
# Data errors (exit 3)
# -----------------------------
class DataError(AdfcmError):
    exit_code = 3


class ParseError(DataError):
    def __init__(self, message: str, row: Optional[int] = None, column: Optional[str] = None) -> None:
        self.row = row
        self.column = column
        where = []
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column!r}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)


class SchemaError(DataError):
    pass


class ShapeMismatch(DataError):
    pass


class LabelsRequired(DataError):
    pass


class UnknownClass(DataError):
    pass


class InvalidClusterCount(DataError):
    pass


class DegenerateData(DataError):
    pass


# -----------------------------
# Numeric failures (exit 4)
# -----------------------------
class NumericError(AdfcmError):
    exit_code = 4


class EmptyCluster(NumericError):
    pass


class NoDecidedRecords(NumericError):
    pass


class DegenerateGMean(NumericError):
    pass
