# cli/report.py
"""
Tabular output for CLI commands: CSV (pandas) or versioned JSON.
Floats are written with round-trip precision so re-parsed files reproduce
the in-memory values exactly.
"""

import json
from pathlib import Path
from typing import Dict, List, Optional

import pandas as pd

from core.errors import ConfigError, IoError

SCHEMA_VERSION = 1
FORMATS = ("csv", "json")


def resolve_format(out: Optional[str], fmt: Optional[str]) -> str:
    if fmt:
        if fmt not in FORMATS:
            raise ConfigError(f"ConfigError: --format must be csv or json, got '{fmt}'")
        return fmt
    if out and Path(out).suffix.lower() == ".json":
        return "json"
    return "csv"


def records_frame(records: List[Dict]) -> pd.DataFrame:
    return pd.DataFrame.from_records(records)


def render_csv(records: List[Dict], delimiter: str = ",") -> str:
    return records_frame(records).to_csv(sep=delimiter, index=False, float_format="%.17g", lineterminator="\n")


def render_json(records: List[Dict], best_k: Optional[Dict[str, int]] = None, **extra) -> str:
    payload = {"schema": SCHEMA_VERSION, "records": records}
    if best_k is not None:
        payload["best_k"] = best_k
    payload.update(extra)
    return json.dumps(payload, indent=2) + "\n"


def write_report(
    records: List[Dict],
    out: str,
    fmt: Optional[str] = None,
    best_k: Optional[Dict[str, int]] = None,
    delimiter: str = ",",
) -> Path:
    path = Path(out)
    fmt = resolve_format(out, fmt)
    text = render_json(records, best_k) if fmt == "json" else render_csv(records, delimiter)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8", newline="")
    except OSError as e:
        raise IoError(f"IoError: cannot write '{path}': {e}")
    return path


def print_table(records: List[Dict]):
    if not records:
        print("(no rows)")
        return
    with pd.option_context("display.max_rows", None, "display.width", 160, "display.precision", 10):
        print(records_frame(records).to_string(index=False))
