import pytest

from cmax.envs.graph import FiniteGraph

RIGHT, LEFT = 0, 1


def corridor(heuristic=(2.0, 1.0, 0.0)) -> FiniteGraph:
    """Cells 0-1-2 with the goal at 2; moving past the ends stays put."""
    succ = [[1, 0], [2, 0], [2, 1]]
    costs = [[1, 1], [1, 1], [1, 1]]
    return FiniteGraph(succ, costs, goals={2}, start=0, heuristic=heuristic)


@pytest.fixture
def corridor_env():
    return corridor()


# verdict lines collected by the acceptance tests, echoed after the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
