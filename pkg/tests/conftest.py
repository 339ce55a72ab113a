import numpy as np
import pytest

from simustab.fixtures import (example2_plants, synthetic_two_zero_plants,
                               trivial_plants)
from simustab.pipeline import run_pipeline
from simustab.ratmat import RationalFunction, RationalMatrix

ACCEPTANCE = []


def record(number, name, ok, detail=""):
    """Called by the acceptance tests; collected lines are printed at the end of the run."""
    ACCEPTANCE.append((number, name, bool(ok), detail))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, name, ok, detail in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  [{number:2d}] {name}  {detail}")


def random_stable_rf(rng, deg=1, proper_strict=False):
    poles = -rng.uniform(0.5, 4.0, deg)
    num_deg = deg - 1 if proper_strict else deg
    num = rng.normal(size=num_deg + 1)
    return RationalFunction.from_poles(num, poles)


def random_rm(rng, n, deg=1):
    return RationalMatrix([[random_stable_rf(rng, deg) for _ in range(n)] for _ in range(n)])


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def example2_run():
    return run_pipeline(example2_plants(), "ex2", mode="sqrt")


@pytest.fixture(scope="session")
def example2_direct_run():
    return run_pipeline(example2_plants(), None, mode="direct")


@pytest.fixture(scope="session")
def synthetic_run():
    return run_pipeline(synthetic_two_zero_plants(), "ex1")


@pytest.fixture(scope="session")
def trivial_run():
    return run_pipeline(trivial_plants())
