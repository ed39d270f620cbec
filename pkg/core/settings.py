# core/settings.py
"""
Runtime configuration.
Every tunable is read from the environment (optionally a project-root .env)
so the library, the CLI and the test-suite share one source of defaults.
"""

import os
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Tuple

from dotenv import load_dotenv

ROOT = Path(__file__).parent.parent
load_dotenv(ROOT / ".env")


# ===========================================
# ENV HELPERS
# ===========================================

def get_bool(key: str, default: bool = False) -> bool:
    return os.getenv(key, str(default)).strip().lower() in ("1", "true", "yes", "on")


def get_int(key: str, default: int) -> int:
    try:
        return int(os.getenv(key, str(default)))
    except ValueError:
        return default


def get_float(key: str, default: float) -> float:
    try:
        return float(os.getenv(key, repr(default)))
    except ValueError:
        return default


def get_str(key: str, default: str = "") -> str:
    return os.getenv(key, default)


def get_list(key: str, default: str = "") -> List[str]:
    val = os.getenv(key, default)
    return [x.strip() for x in val.split(",") if x.strip()]


def _get_sizes(key: str, default: str) -> Tuple[int, ...]:
    try:
        return tuple(int(x) for x in get_list(key, default))
    except ValueError:
        return tuple(int(x) for x in default.split(","))


@dataclass(frozen=True)
class Settings:
    leaf_size: int = 16
    tie_scan_cap: int = 5000
    triple_scan_cap: int = 2000
    max_triples: int = 10000
    workers: int = 1
    chunk_size: int = 1024
    tolerance: float = 1e-10
    k_max_default: int = 50
    reps: int = 5
    bench_sizes: Tuple[int, ...] = (500, 1000, 2000, 4000, 8000)
    bench_k: int = 5
    delimiter: str = ","
    log_dir: Path = ROOT / "logs"
    log_level: str = "INFO"
    log_to_file: bool = True


def _from_env() -> Settings:
    log_dir = Path(get_str("LOOCV_LOG_DIR", str(ROOT / "logs")))
    if not log_dir.is_absolute():
        log_dir = ROOT / log_dir
    return Settings(
        leaf_size=max(1, get_int("LOOCV_LEAF_SIZE", 16)),
        tie_scan_cap=get_int("LOOCV_TIE_SCAN_CAP", 5000),
        triple_scan_cap=get_int("LOOCV_TRIPLE_SCAN_CAP", 2000),
        max_triples=get_int("LOOCV_MAX_TRIPLES", 10000),
        workers=max(1, get_int("LOOCV_WORKERS", 1)),
        chunk_size=max(1, get_int("LOOCV_CHUNK_SIZE", 1024)),
        tolerance=get_float("LOOCV_TOLERANCE", 1e-10),
        k_max_default=max(1, get_int("LOOCV_K_MAX_DEFAULT", 50)),
        reps=max(1, get_int("LOOCV_REPS", 5)),
        bench_sizes=_get_sizes("LOOCV_BENCH_SIZES", "500,1000,2000,4000,8000"),
        bench_k=max(1, get_int("LOOCV_BENCH_K", 5)),
        delimiter=get_str("LOOCV_DELIMITER", ",") or ",",
        log_dir=log_dir,
        log_level=get_str("LOOCV_LOG_LEVEL", "INFO").upper(),
        log_to_file=get_bool("LOOCV_LOG_TO_FILE", True),
    )


# Singleton
_settings: Optional[Settings] = None


def get_settings() -> Settings:
    global _settings
    if _settings is None:
        _settings = _from_env()
    return _settings


def reload_settings() -> Settings:
    """Re-read the environment. Tests call this after monkeypatching env vars."""
    global _settings
    _settings = _from_env()
    return _settings
