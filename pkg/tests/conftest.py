import pytest

_REPORT = []


@pytest.fixture
def acceptance_report():
    """Collects one summary line per acceptance criterion."""
    return _REPORT.append


def pytest_terminal_summary(terminalreporter):
    if _REPORT:
        terminalreporter.section("acceptance criteria")
        for line in _REPORT:
            terminalreporter.write_line(line)
