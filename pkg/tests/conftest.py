import pytest

from routezip import Graph

acceptance_report: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Echo one verdict line per acceptance criterion after the run."""
    if acceptance_report:
        terminalreporter.section("acceptance criteria")
        for line in acceptance_report:
            terminalreporter.write_line(line)


@pytest.fixture
def diamond() -> Graph:
    """Two equal-cost routes from 0 to 3, one over 1 and one over 2."""
    return Graph(4, [(0, 1, 1), (1, 3, 1), (0, 2, 1), (2, 3, 1)])


@pytest.fixture
def chain5() -> Graph:
    """One-directional unit chain 0 -> 1 -> 2 -> 3 -> 4."""
    return Graph(5, [(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 4, 1)])


@pytest.fixture
def diamond_direct() -> Graph:
    """The diamond plus a direct edge 0 -> 3 that ties both detours."""
    return Graph(4, [(0, 1, 1), (1, 3, 1), (0, 2, 1), (2, 3, 1), (0, 3, 2)])
