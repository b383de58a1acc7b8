import pytest

_LINES: dict[int, str] = {}


@pytest.fixture
def criterion():
    """``criterion(num, title, ok, detail)`` records one PASS/FAIL line and asserts ``ok``."""

    def record(num: int, title: str, ok: bool, detail: str = ""):
        line = f"criterion {num:2d} {'PASS' if ok else 'FAIL'}  {title}" + (f"  [{detail}]" if detail else "")
        _LINES[num] = line
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for num in sorted(_LINES):
            terminalreporter.write_line(_LINES[num])
