import numpy as np
import pytest

from symhinf.fixtures import buffer3_system, chain_system, random_system


@pytest.fixture
def buf3():
    return buffer3_system()


@pytest.fixture
def chain():
    return chain_system()


@pytest.fixture
def scalar():
    from symhinf.model import validate_system
    return validate_system([[-2.0]], [[1.0]])


def seeded_systems(count, seed, nmax=6, mmax=6, diagonal=False):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        n = int(rng.integers(1, nmax + 1))
        m = int(rng.integers(1, mmax + 1))
        out.append(random_system(rng, n, m, diagonal=diagonal))
    return out


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
