import pytest

_LINES: list[str] = []


@pytest.fixture(scope="session")
def report_criterion():
    """Record one PASS/FAIL line per acceptance criterion."""

    def record(number: int, ok: bool, detail: str, elapsed: float):
        line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail} ({elapsed:.1f}s)"
        _LINES.append(line)
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in _LINES:
            terminalreporter.write_line(line)
