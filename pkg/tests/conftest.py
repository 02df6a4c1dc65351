import numpy as np
import pytest

from entropyrisk import GeneratorConfig, generate

ACCEPTANCE_LINES: list[str] = []


def gen(kind, n, seed, **params):
    return generate(GeneratorConfig(kind, n, seed, params))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def gauss50k():
    return gen("gaussian", 50_000, 7)[0]


@pytest.fixture(scope="session")
def bvn06():
    return gen("bivariate_gaussian", 50_000, 11, rho=0.6)


@pytest.fixture(scope="session")
def indep50k():
    return gen("bivariate_gaussian", 50_000, 13, rho=0.0)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
