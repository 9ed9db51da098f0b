import sys

import numpy as np
import pytest

from steadysqg.solver import SolverConfig, solve


@pytest.fixture(scope="session")
def bundle_alpha2():
    return solve(SolverConfig(family="sqg", m=3, alpha=2.0, modes=256, grid=1024, tol=1e-10))


@pytest.fixture(scope="session")
def bundle_alpha3():
    return solve(SolverConfig(family="sqg", m=3, alpha=3.0, modes=256, grid=1024, tol=1e-10))


@pytest.fixture(scope="session")
def bundle_alpha1():
    return solve(SolverConfig(family="sqg", m=3, alpha=1.0))


@pytest.fixture(scope="session")
def bundle_degregorio():
    return solve(SolverConfig(family="degregorio", m=1, alpha=2.0, modes=256, grid=1024, tol=1e-10))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.report_lines():
        terminalreporter.write_line(line)
