import json
import random
from importlib.resources import files

import pytest

from tiersynth.corpus import corpus, random_tiers
from tiersynth.domain import load_domain

FIXTURES = files("tiersynth") / "fixtures"

# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE: dict = {}


def fixture_path(name: str) -> str:
    return str(FIXTURES / name)


@pytest.fixture(scope="session")
def two_road():
    return load_domain(fixture_path("two-road.json"))


@pytest.fixture(scope="session")
def transient():
    return load_domain(fixture_path("two-road-transient.json"))


@pytest.fixture(scope="session")
def robot():
    return load_domain(fixture_path("robot.json"))


@pytest.fixture(scope="session")
def robot_goals():
    return json.loads((FIXTURES / "robot.goals.json").read_text())


def corpus_instances(n_tiers: int = 3, size: int = 24, seed: int = 7):
    """(domain, tiers) pairs shared by the cross-check tests."""
    rng = random.Random(seed + 1000)
    return [(d, random_tiers(rng, d.fluents, n_tiers)) for d in corpus(seed=seed, size=size)]


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[k])
