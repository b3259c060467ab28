import pytest

_LINES = []


@pytest.fixture
def report():
    """Record one PASS/FAIL line per acceptance criterion and assert on it."""

    def _report(criterion, ok, detail=""):
        line = f"{'PASS' if ok else 'FAIL'} {criterion}: {detail}"
        _LINES.append(line)
        print(line)
        assert ok, line

    return _report


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in _LINES:
            terminalreporter.write_line(line)
