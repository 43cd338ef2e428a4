import os

import pytest

_ACCEPTANCE_LINES: list[str] = []


class _Recorder:
    def __call__(self, criterion: str, passed: bool, detail: str = "") -> None:
        status = "PASS" if passed else "FAIL"
        _ACCEPTANCE_LINES.append(f"[{status}] criterion {criterion}: {detail}".rstrip())


@pytest.fixture(scope="session")
def record():
    return _Recorder()


@pytest.fixture(scope="session")
def workers() -> int:
    return max(1, min(8, os.cpu_count() or 1))


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
