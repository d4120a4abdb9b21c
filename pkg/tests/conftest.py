import pytest

_LINES: dict = {}


@pytest.fixture
def criterion():
    """Record one acceptance line: ``criterion(k, ok, detail)``; returns ``ok``."""

    def record(k, ok, detail):
        _LINES[k] = f"criterion {k:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _LINES:
        return
    terminalreporter.section("acceptance")
    for k in sorted(_LINES):
        terminalreporter.write_line(_LINES[k])
