# tools/conftest.py
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))
sys.path.insert(0, str(Path(__file__).parent))

from core.instrumentation import get_counters  # noqa: E402
from core.settings import reload_settings  # noqa: E402


@pytest.fixture(autouse=True)
def fresh_counters():
    get_counters().reset()
    yield
    get_counters().reset()


@pytest.fixture
def small_chunks(monkeypatch):
    """Force many worker chunks so thread-count invariance is actually exercised."""
    monkeypatch.setenv("LOOCV_CHUNK_SIZE", "7")
    reload_settings()
    yield
    monkeypatch.undo()
    reload_settings()
