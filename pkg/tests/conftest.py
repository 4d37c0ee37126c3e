import pytest

from diffauction import load_scenario
from diffauction.generators import line_graph

ACCEPTANCE: list[tuple[str, bool, str]] = []


@pytest.fixture
def line5():
    return line_graph(5)


@pytest.fixture
def fig2():
    net, _ = load_scenario("fig2")
    return net


@pytest.fixture
def record():
    """Record one acceptance line: record(name, ok, detail)."""

    def _record(name: str, ok: bool, detail: str = "") -> bool:
        ACCEPTANCE.append((name, bool(ok), detail))
        return ok

    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
