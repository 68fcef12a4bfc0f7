import pytest

from dm1queue import QueueParams


@pytest.fixture
def params():
    """Running example: lam = 2, mu = 3, so a = 1/2 and rho = 2/3."""
    return QueueParams(2.0, 3.0)


ACCEPTANCE_LINES = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[ACCEPTANCE_LINES] = []


@pytest.fixture
def acceptance_log(request):
    return request.config.stash[ACCEPTANCE_LINES]


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(ACCEPTANCE_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].split("_")[1].rstrip(":"))):
            terminalreporter.write_line(line)
