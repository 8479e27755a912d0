import numpy as np
import pytest

from resonance_tracer import RadialGrid, RadialPotential, RadialProblem, Seed, StudyDefinition, run_study

# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES = []

GAUSSIAN_LAMBDAS = (25.0, 46.0, 72.0, 104.0, 142.0, 188.0)
SQUARE_WELL_LAMBDAS = (5.0, 15.0, 32.0)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(':'))):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def gaussian_grid():
    return RadialGrid(4.8, 8192)


@pytest.fixture(scope="session")
def gaussian_problem(gaussian_grid):
    return RadialProblem(RadialPotential("gaussian"), 3, gaussian_grid)


@pytest.fixture(scope="session")
def square_well_problem():
    return RadialProblem(RadialPotential("square_well", {"a": 1.0}), 0, RadialGrid(1.1, 2048))


def gaussian_study_definition():
    return StudyDefinition(
        potential=RadialPotential("gaussian"),
        l=3,
        grid=RadialGrid(4.8, 8192),
        lambda_range=(0.0, 200.0),
        seeds=[Seed(lam, bracket=(0.1, 2.0)) for lam in GAUSSIAN_LAMBDAS],
    )


def square_well_study_definition():
    return StudyDefinition(
        potential=RadialPotential("square_well", {"a": 1.0}),
        l=0,
        grid=RadialGrid(1.1, 2048),
        lambda_range=(0.05, 40.0),
        seeds=[Seed(lam, bracket=(0.1, 3.0)) for lam in SQUARE_WELL_LAMBDAS],
        im_k_floor=-4.5,
    )


@pytest.fixture(scope="session")
def gaussian_study():
    study = gaussian_study_definition()
    return study, run_study(study)


@pytest.fixture(scope="session")
def square_well_study():
    study = square_well_study_definition()
    return study, run_study(study)
