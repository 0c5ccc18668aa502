"""
Shared fixtures: services and the two bundled case studies
"""

from pathlib import Path

import pytest

from schemas import DecisionProblem, MeasurementModel, ProbVector
from services import (
    create_bayes_service,
    create_design_service,
    create_model_service,
    create_problem_file_service,
    create_report_service,
    create_voi_service,
)

PROBLEMS_DIR = Path(__file__).parent / "problems"

TURTLE_SURVIVAL = {
    "d1": (0.85, 0.72, 0.68),
    "d2": (0.90, 0.83, 0.60),
    "d3": (0.90, 0.86, 0.40),
}


@pytest.fixture
def model_service():
    return create_model_service()


@pytest.fixture
def bayes_service():
    return create_bayes_service()


@pytest.fixture
def voi_service(bayes_service, model_service):
    return create_voi_service(bayes_service, model_service)


@pytest.fixture
def design_service(voi_service):
    return create_design_service(voi_service)


@pytest.fixture
def problem_file_service(model_service):
    return create_problem_file_service(model_service)


@pytest.fixture
def report_service():
    return create_report_service()


@pytest.fixture
def frog_problem():
    """Translocation under disease uncertainty: EV 95 vs 100"""
    return DecisionProblem(
        name="frog",
        states=ProbVector(labels=("disease present", "disease absent"), probabilities=(0.5, 0.5)),
        actions=("translocate", "do nothing"),
        values=((55.0, 135.0), (100.0, 100.0)),
    )


@pytest.fixture
def frog_test():
    """Imperfect disease test: 73% sensitivity, 94% specificity"""
    return MeasurementModel(
        name="disease-test",
        outcomes=("positive", "negative"),
        likelihood=((0.73, 0.27), (0.06, 0.94)),
    )


@pytest.fixture
def turtle_problem():
    """Release age under three post-release survival hypotheses"""
    return DecisionProblem(
        name="turtle",
        states=ProbVector(
            labels=("no effect", "effect decreases with age", "effect increases with age"),
            probabilities=(0.4, 0.2, 0.4),
        ),
        actions=("release 3-year olds", "release 4-year olds", "release 5-year olds"),
        values=(
            (0.689, 0.582, 0.547),
            (0.729, 0.674, 0.484),
            (0.745, 0.710, 0.332),
        ),
    )


@pytest.fixture
def turtle_designs(model_service):
    """One-year trial releases of ten turtles aged 3, 4 and 5"""
    return [model_service.binomial_trial(name, 10, p) for name, p in TURTLE_SURVIVAL.items()]


@pytest.fixture
def frog_file():
    return PROBLEMS_DIR / "frog.json"


@pytest.fixture
def turtle_file():
    return PROBLEMS_DIR / "turtle.json"
