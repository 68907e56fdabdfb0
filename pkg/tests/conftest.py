import functools

import pytest

from pmuplace.topology import build_connectivity, load_network


@functools.lru_cache(maxsize=None)
def _system(name):
    net = load_network(name)
    return net, build_connectivity(net)


@pytest.fixture
def system():
    """system('ieee14') -> (Network, connectivity matrix)"""
    return _system


@pytest.fixture
def ieee14():
    return _system("ieee14")


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(mod.VERDICTS, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
        terminalreporter.write_line(line)
