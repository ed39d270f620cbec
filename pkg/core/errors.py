# core/errors.py
"""
Exception hierarchy.
Each class carries the exit code the CLI maps it to:
2 = configuration error, 3 = data error.
"""

from typing import Optional


class LoocvError(Exception):
    exit_code = 1


# ============== CONFIG ERRORS (exit 2) ==============

class ConfigError(LoocvError, ValueError):
    exit_code = 2


class KTooLarge(ConfigError):
    def __init__(self, k: int, limit: int, what: str = "k"):
        self.k = k
        self.limit = limit
        super().__init__(f"KTooLarge: {what}={k} exceeds the allowed maximum {limit}")


class InvalidKRange(ConfigError):
    pass


class EmptySweep(ConfigError):
    pass


class RowOutOfRange(ConfigError, IndexError):
    def __init__(self, row: int, what: str = "held-out row"):
        self.row = row
        super().__init__(f"RowOutOfRange: {what} {row} is not a row of this data")


# ============== DATA ERRORS (exit 3) ==============

class DataError(LoocvError, ValueError):
    exit_code = 3


class EmptyDataset(DataError):
    pass


class DimensionMismatch(DataError):
    pass


class NonFiniteInput(DataError):
    pass


class DatasetTooSmall(DataError):
    pass


class ConstantFeature(DataError):
    def __init__(self, column: str):
        self.column = column
        super().__init__(f"ConstantFeature: column '{column}' has zero variance")


class MissingColumn(DataError):
    def __init__(self, column: str, available=()):
        self.column = column
        hint = f" (available: {', '.join(available)})" if available else ""
        super().__init__(f"MissingColumn: '{column}' not found{hint}")


class ParseError(DataError):
    def __init__(self, message: str, row: Optional[int] = None, column: Optional[str] = None):
        self.row = row
        self.column = column
        where = []
        if row is not None:
            # row is the 1-based data row; the header occupies line 1
            where.append(f"row {row} (line {row + 1})")
        if column is not None:
            where.append(f"column '{column}'")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(f"{type(self).__name__}: {prefix}{message}")


class NonNumericCell(ParseError):
    pass


class IoError(LoocvError, OSError):
    exit_code = 3
