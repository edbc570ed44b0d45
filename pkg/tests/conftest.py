import sys

import pytest
from hypothesis import settings

from netent.builtins import pg13, zy_gap
from netent.groups import SubgroupFamily, cyclic, elementary_abelian

settings.register_profile("netent", max_examples=60, deadline=None)
settings.load_profile("netent")


def fs(*xs):
    return frozenset(xs)


@pytest.fixture
def z22_family():
    """(Z2)^2 with the three order-2 subgroups and the trivial one."""
    return SubgroupFamily(elementary_abelian(2), (fs(0, 1), fs(0, 2), fs(0, 3), fs(0)))


@pytest.fixture
def z23_family():
    """(Z2)^3, G1 = span{001}, G2 = span{010}, G3 = span{100}, G4 = {0}."""
    return SubgroupFamily(elementary_abelian(3), (fs(0, 1), fs(0, 2), fs(0, 4), fs(0)))


@pytest.fixture
def z6_family():
    return SubgroupFamily(cyclic(6), (fs(0, 3), fs(0, 2, 4), fs(0), fs(0)))


@pytest.fixture
def pg13_vec():
    return pg13()


@pytest.fixture
def zy_vec():
    return zy_gap(1)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod and mod.LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(mod.LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
