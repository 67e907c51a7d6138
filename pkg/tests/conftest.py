from __future__ import annotations

import pytest

_CRITERIA: list[str] = []


class Criterion:
    """Records one acceptance line, then asserts."""

    def __init__(self, name: str):
        self.name = name

    def check(self, ok: bool, detail: str) -> None:
        _CRITERIA.append(f"{'PASS' if ok else 'FAIL'}  {self.name}: {detail}")
        print(_CRITERIA[-1])
        assert ok, detail


@pytest.fixture
def criterion(request) -> Criterion:
    marker = request.node.get_closest_marker("criterion")
    return Criterion(marker.args[0] if marker else request.node.name)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(name): acceptance criterion reported in the summary")


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in _CRITERIA:
            terminalreporter.write_line(line)
