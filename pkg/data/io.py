# data/io.py
"""CSV ingestion and export (UTF-8, header row, '.' decimal point)."""

import re
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np
import pandas as pd

from core.errors import EmptyDataset, IoError, MissingColumn, NonNumericCell, ParseError
from core.logs import get_logger
from core.settings import get_settings
from regression.dataset import Dataset

logger = get_logger("data")

PathLike = Union[str, Path]

_LINE_RE = re.compile(r"line (\d+)")


def _as_names(columns: Union[None, str, Sequence[str]]) -> Optional[list]:
    if columns is None:
        return None
    if isinstance(columns, str):
        return [c.strip() for c in columns.split(",") if c.strip()]
    return [str(c).strip() for c in columns]


def _read_frame(path: Path, delimiter: str) -> pd.DataFrame:
    if not path.is_file():
        raise IoError(f"IoError: cannot read '{path}': no such file")
    try:
        return pd.read_csv(
            path,
            sep=delimiter,
            dtype=str,
            keep_default_na=False,
            na_filter=False,
            encoding="utf-8",
            skip_blank_lines=True,
        )
    except pd.errors.EmptyDataError:
        raise EmptyDataset(f"EmptyDataset: '{path}' has no header or rows")
    except pd.errors.ParserError as e:
        match = _LINE_RE.search(str(e))
        row = int(match.group(1)) - 1 if match else None
        raise ParseError(f"malformed row ({e})", row=row)
    except UnicodeDecodeError as e:
        raise ParseError(f"file is not valid UTF-8 ({e.reason})")
    except OSError as e:
        raise IoError(f"IoError: cannot read '{path}': {e}")


def _numeric_block(frame: pd.DataFrame, columns: list) -> np.ndarray:
    """Convert selected string columns to float64, reporting the first bad cell."""
    first_bad = None  # (row, column position, message, missing)
    for pos, col in enumerate(columns):
        raw = frame[col]
        missing = raw.isna()
        text = raw.where(~missing, "").astype(str).str.strip()
        empty = text == ""
        parsed = pd.to_numeric(text.where(~empty, "nan"), errors="coerce")
        bad = empty.to_numpy() | ~np.isfinite(parsed.to_numpy(dtype=np.float64))
        if bad.any():
            row = int(np.argmax(bad))
            if first_bad is None or (row, pos) < first_bad[:2]:
                cell = text.iloc[row]
                if empty.iloc[row]:
                    first_bad = (row, pos, "missing cell", True)
                else:
                    first_bad = (row, pos, f"value '{cell}' is not a finite number", False)

    if first_bad is not None:
        row, pos, message, missing_cell = first_bad
        error = ParseError if missing_cell else NonNumericCell
        raise error(message, row=row + 1, column=columns[pos])

    # numpy's str -> float64 parse is correctly rounded, so written files read back exactly
    text = frame[columns].apply(lambda s: s.astype(str).str.strip())
    return text.to_numpy(dtype=str).astype(np.float64)


def load_csv(
    path: PathLike,
    target_columns: Union[str, Sequence[str]],
    feature_columns: Union[None, str, Sequence[str]] = None,
    delimiter: Optional[str] = None,
) -> Dataset:
    """
    Load a Dataset from a delimited text file with a header row.

    Args:
        path: CSV file
        target_columns: output column name(s), M >= 1
        feature_columns: input column names; None means every non-target column
        delimiter: field separator (defaults to LOOCV_DELIMITER)

    Raises:
        IoError, ParseError (with 1-based data row), MissingColumn, NonNumericCell
    """
    path = Path(path)
    frame = _read_frame(path, delimiter or get_settings().delimiter)
    frame.columns = [str(c).strip() for c in frame.columns]
    available = list(frame.columns)

    targets = _as_names(target_columns) or []
    if not targets:
        raise MissingColumn("<target>", available)
    for col in targets:
        if col not in available:
            raise MissingColumn(col, available)

    features = _as_names(feature_columns)
    if features is None:
        features = [c for c in available if c not in targets]
    for col in features:
        if col not in available:
            raise MissingColumn(col, available)
    if not features:
        raise MissingColumn("<features>", available)
    if len(frame) == 0:
        raise EmptyDataset(f"EmptyDataset: '{path}' has a header but no rows")

    # one pass over every used column, in file order, so the first bad cell is reported
    used = [c for c in available if c in features or c in targets]
    block = _numeric_block(frame, used)
    x = block[:, [used.index(c) for c in features]]
    y = block[:, [used.index(c) for c in targets]]
    dataset = Dataset.from_arrays(x, y, feature_names=features, target_names=targets)
    logger.info(f"Loaded {path.name}: n={dataset.n}, D={dataset.dim}, M={dataset.n_outputs}")
    return dataset


def dataset_frame(dataset: Dataset) -> pd.DataFrame:
    columns = list(dataset.feature_names) + list(dataset.target_names)
    return pd.DataFrame(np.hstack([dataset.inputs, dataset.outputs]), columns=columns)


def write_csv(dataset: Dataset, path: PathLike, delimiter: Optional[str] = None) -> Path:
    """Write features then targets with round-trip float precision."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        dataset_frame(dataset).to_csv(
            path, sep=delimiter or get_settings().delimiter, index=False, float_format="%.17g", lineterminator="\n"
        )
    except OSError as e:
        raise IoError(f"IoError: cannot write '{path}': {e}")
    logger.info(f"Wrote {path.name}: n={dataset.n}")
    return path
