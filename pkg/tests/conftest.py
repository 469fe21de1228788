import pytest

ACCEPTANCE_LINES = []


@pytest.fixture
def report_line():
    """Record one PASS/FAIL line for the acceptance summary."""
    def record(criterion: int, passed: bool, detail: str, seconds: float, limit=None):
        budget = f" (limit {limit:g} s)" if limit else ""
        line = (f"{'PASS' if passed else 'FAIL'} criterion {criterion}: {detail} "
                f"[{seconds:.1f} s{budget}]")
        ACCEPTANCE_LINES.append(line)
        print(line)
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
