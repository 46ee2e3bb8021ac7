import numpy as np
import pytest

from ellip1d import QuadratureRule, builtin_problem, constant_field
from ellip1d.problems import Problem, ScalarField


@pytest.fixture(scope="session")
def rule3():
    return QuadratureRule.gauss(3)


@pytest.fixture(scope="session")
def rule5():
    return QuadratureRule.gauss(5)


@pytest.fixture(scope="session")
def ex1():
    return builtin_problem("ex1")


@pytest.fixture(scope="session")
def ex2():
    return builtin_problem("ex2")


@pytest.fixture(scope="session")
def ex3():
    return builtin_problem("ex3")


@pytest.fixture(scope="session")
def ex4():
    return builtin_problem("ex4")


def unit_problem(f=None, alpha=0.0, beta=0.0, name="unit"):
    """Problem with kappa = 1 and the given data; u0 is its exact solution."""
    return Problem(
        name=name,
        length=1.0,
        kappa=constant_field(1.0),
        f=f if f is not None else constant_field(1.0),
        alpha=alpha,
        beta=beta,
    )


def field(fn, description=""):
    return ScalarField(lambda x: np.broadcast_to(np.asarray(fn(x), float), x.shape),
                       description)
