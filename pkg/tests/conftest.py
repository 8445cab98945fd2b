import pytest

_LINES: list[str] = []


@pytest.fixture
def acceptance(capsys):
    """Record and print one pass/fail line per acceptance criterion."""

    def record(number: int, title: str, passed: bool, detail: str, seconds: float) -> bool:
        line = (f"criterion {number} [{'PASS' if passed else 'FAIL'}] {title}: {detail} "
                f"({seconds:.1f} s)")
        _LINES.append(line)
        with capsys.disabled():
            print("\n" + line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
