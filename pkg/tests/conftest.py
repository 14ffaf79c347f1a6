import pytest

_LINES = []


@pytest.fixture(scope="session")
def criterion_report():
    """Collects one PASS/FAIL line per acceptance criterion."""
    def report(number, name, passed, detail):
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {number:>2} {name}: {detail}"
        _LINES.append((number, line))
        print(line)
        return passed
    return report


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(_LINES):
            terminalreporter.write_line(line)
