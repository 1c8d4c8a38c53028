import numpy as np
import pytest

from bajlab import GeneratorPair, OpenInterval


def make_pair(f: str, g: str, lo: float, hi: float, samples: int = 257) -> GeneratorPair:
    pair = GeneratorPair.from_expressions(f, g, OpenInterval(lo, hi))
    pair.require_valid(samples)
    return pair


# Ten structurally different validated pairs used by the axiom suites.
PAIR_POOL = [
    ("x", "1", 0.0, 10.0),
    ("sin(x)", "cos(x)", -1.3, 1.3),
    ("sinh(x)", "cosh(x)", -1.3, 1.3),
    ("x^2", "x", 0.5, 4.0),
    ("exp(x)", "1", -1.0, 2.0),
    ("ln(x)", "1", 1.0, 3.0),
    ("x^3", "x", 0.5, 2.0),
    ("1/x", "1", 0.5, 3.0),
    ("x", "sqrt(x)", 0.5, 4.0),
    ("exp(x)", "exp(x/2)", -1.0, 1.0),
]


@pytest.fixture(scope="session")
def pair_pool():
    return [make_pair(*entry) for entry in PAIR_POOL]


@pytest.fixture(scope="session")
def sin_cos():
    return make_pair("sin(x)", "cos(x)", -1.3, 1.3)


@pytest.fixture(scope="session")
def sinh_cosh():
    return make_pair("sinh(x)", "cosh(x)", -1.3, 1.3)


@pytest.fixture(scope="session")
def identity_pair():
    return make_pair("x", "1", -1.3, 1.3)


def core_points(pair, n, rng):
    a, b = pair.domain.core()
    return rng.uniform(a, b, n)


@pytest.fixture
def rng():
    return np.random.default_rng(20260809)
