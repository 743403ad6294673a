import pytest

from planar_une.harness import load_corpus
from planar_une.sat_reduction import build_reduction_graph, normalize

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def fig2():
    formula, _ = normalize(load_corpus("fig2"))
    return build_reduction_graph(formula)


@pytest.fixture
def record_criterion():
    def record(number: int, title: str, ok: bool, detail: str = "") -> None:
        line = f"criterion {number} [{'PASS' if ok else 'FAIL'}] {title}" + (f": {detail}" if detail else "")
        ACCEPTANCE_LINES.append(line)
        print(line)
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
