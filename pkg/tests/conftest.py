import pytest

_RESULTS: dict = {}


@pytest.fixture
def criterion():
    """Record a criterion outcome; the summary prints one line per criterion."""

    def record(num: int, ok: bool, detail: str):
        _RESULTS[num] = (ok, detail)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_RESULTS):
        ok, detail = _RESULTS[num]
        terminalreporter.write_line(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
