import pytest

RESULTS: list[str] = []


def report(name: str, ok: bool, detail: str = "") -> None:
    """Record one PASS/FAIL line; all lines are repeated in the terminal summary."""
    line = f"[{'PASS' if ok else 'FAIL'}] {name}" + (f": {detail}" if detail else "")
    RESULTS.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)


@pytest.fixture
def tmp_out(tmp_path):
    return tmp_path / "out"
