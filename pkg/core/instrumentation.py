# core/instrumentation.py
"""Thread-safe named counters (index builds, model fits, held-out evaluations, queries)."""

import threading
from typing import Dict

INDEX_BUILDS = "index_builds"
MODEL_FITS = "model_fits"
HELD_OUT_EVALUATIONS = "held_out_evaluations"
QUERIES = "queries"


class Counters:
    def __init__(self):
        self._lock = threading.Lock()
        self._values: Dict[str, int] = {}

    def count(self, name: str, amount: int = 1):
        with self._lock:
            self._values[name] = self._values.get(name, 0) + amount

    def get(self, name: str) -> int:
        with self._lock:
            return self._values.get(name, 0)

    def snapshot(self) -> Dict[str, int]:
        with self._lock:
            return dict(self._values)

    def reset(self):
        with self._lock:
            self._values.clear()


_counters = Counters()


def get_counters() -> Counters:
    return _counters
