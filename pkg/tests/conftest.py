import pytest

CRITERIA: list[tuple[str, bool, str]] = []


@pytest.fixture
def record():
    """Log one acceptance line; the terminal summary prints them all."""

    def _record(name: str, passed: bool, detail: str = "") -> bool:
        CRITERIA.append((name, bool(passed), detail))
        return bool(passed)

    return _record


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in CRITERIA:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}  {detail}".rstrip())
