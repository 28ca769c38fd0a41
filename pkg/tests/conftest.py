import pytest

from mdcensus.multigraph import generate
from mdcensus.oracle import ONE_VERTEX_3MFLD, enumerate_gluings

ACCEPTANCE_LINES = {}


def record_acceptance(number: int, passed: bool, detail: str) -> None:
    ACCEPTANCE_LINES[number] = f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}"
    print(ACCEPTANCE_LINES[number])


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])


@pytest.fixture(scope="session")
def small_graphs():
    """Connected graphs on 1..3 nodes, in generator order."""
    return [g for n in (1, 2, 3) for g in generate(n)]


@pytest.fixture(scope="session")
def oracle_triangulations(small_graphs):
    """Brute-force one-vertex 3-manifold triangulations for every small graph."""
    return {g: enumerate_gluings(g, ONE_VERTEX_3MFLD) for g in small_graphs}
