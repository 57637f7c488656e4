import pytest

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def report():
    """Record one acceptance line; printed together at the end of the run."""
    def _report(criterion: int, name: str, ok: bool, detail: str = "", informational: bool = False):
        # informational lines are context for a criterion, never its verdict
        status = "INFO" if informational else ("PASS" if ok else "FAIL")
        _ACCEPTANCE_LINES.append(f"criterion {criterion} [{status}] {name}: {detail}".rstrip(": "))
        return ok

    return _report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
