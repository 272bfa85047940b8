import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from cpsignal import build_problem, load_problem

DATA = Path(__file__).parent.parent / "src" / "cpsignal" / "data"


def scenario(number: int, variant: str = "deception"):
    problem = load_problem(DATA / f"scenario{number}.json")
    if variant != problem.variant:
        problem = build_problem(problem.pmf, variant)
    return problem


@pytest.fixture(scope="session")
def scenario1():
    return scenario(1)


@pytest.fixture(scope="session")
def scenario2():
    return scenario(2)


@pytest.fixture(scope="session")
def scenario3():
    return scenario(3)
