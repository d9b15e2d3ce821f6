import os

import numpy as np
import pytest
from hypothesis import settings

from lse_cond.perturbation_lab import SELECTIONS, TestProblemConfig, build_test_problem
from lse_cond.lse_solver import solve

settings.register_profile("ci", max_examples=50, deadline=None)
settings.register_profile("thorough", max_examples=500, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "ci"))

TABLE_GRID = [(eta, delta) for eta in (1e-3, 1e-6) for delta in (1e-3, 1e-6)]

_acceptance_lines = []


@pytest.fixture
def acceptance_log():
    """Collects one PASS/FAIL line per acceptance criterion for the summary."""
    return _acceptance_lines


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)


@pytest.fixture(params=TABLE_GRID, ids=lambda g: f"eta{g[0]:g}-delta{g[1]:g}")
def table_solution(request):
    eta, delta = request.param
    return solve(build_test_problem(TestProblemConfig(eta=eta, delta=delta)))


@pytest.fixture
def model_problem():
    return build_test_problem(TestProblemConfig(eta=1e-3, delta=1e-3))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(params=list(SELECTIONS), ids=str)
def table_selection(request):
    return request.param, SELECTIONS[request.param]
