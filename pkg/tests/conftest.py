import pytest

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def verdict_line():
    """Record ``ACCEPTANCE <n> PASS|FAIL ...`` and print it at the end of the run."""
    def record(number: int, ok: bool, detail: str):
        line = f"ACCEPTANCE {number:>2} {'PASS' if ok else 'FAIL'}  {detail}"
        _ACCEPTANCE_LINES.append(line)
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
        terminalreporter.write_line(line)
