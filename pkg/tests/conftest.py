"""Shared fixtures: cached classifications and reconstruction spaces."""

import sys

import numpy as np
import pytest

from patchdg.geometry import CircleLevelSet, classify
from patchdg.mesh import generate_structured
from patchdg.reconstruction import build_space

DOMAIN = (-1.0, -1.0, 1.0, 1.0)


@pytest.fixture(scope="session")
def circle20():
    mesh = generate_structured(DOMAIN, 20)
    return classify(mesh, CircleLevelSet())


@pytest.fixture(scope="session")
def circle10():
    mesh = generate_structured(DOMAIN, 10)
    return classify(mesh, CircleLevelSet())


@pytest.fixture(scope="session")
def space20_m2(circle20):
    return build_space(circle20, 2)


@pytest.fixture(scope="session")
def space20_m3(circle20):
    return build_space(circle20, 3)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Repeat the acceptance verdict lines after the run; the per-test
    print() calls are captured by pytest for passing tests."""
    mod = sys.modules.get("test_acceptance") or \
        sys.modules.get("tests.test_acceptance")
    lines = getattr(mod, "VERDICT_LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
