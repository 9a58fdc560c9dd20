import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_ACCEPTANCE: dict[int, tuple[str, bool, float, float]] = {}


@pytest.fixture
def criterion():
    """Record ``(number, title, passed, seconds, limit)`` for the summary table."""

    def record(number, title, passed, seconds, limit):
        _ACCEPTANCE[number] = (title, bool(passed), seconds, limit)

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        title, ok, secs, limit = _ACCEPTANCE[n]
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"[{status}] {n:>2}. {title} ({secs:.2f}s, limit {limit:g}s)")
