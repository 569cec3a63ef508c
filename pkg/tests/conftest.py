"""Shared fixtures and seeded parameter material."""

import random

import pytest

from stratalg import Field, builtin_model


def draw_params(seed, bound=30):
    """Six distinct small scalars. Distinctness keeps the documented
    degeneracies (equal or vanishing parameters) out of the draw, so
    every sampled set is generic."""
    rng = random.Random(f"{seed}:params")
    return tuple(rng.sample(range(2, bound), 6))


@pytest.fixture(scope="session")
def q_field():
    return Field()


@pytest.fixture(scope="session")
def f5():
    return Field(5)


@pytest.fixture(scope="session")
def f7():
    return Field(7)


@pytest.fixture(scope="session")
def f19():
    return Field(19)


@pytest.fixture(scope="session")
def f23():
    return Field(23)


@pytest.fixture(scope="session")
def nonlinear19(f19):
    return builtin_model("nonlinear3", params=(2, 3, 5, 1, 4, 6), field=f19)


@pytest.fixture(scope="session")
def nonlinear23(f23):
    return builtin_model("nonlinear3", params=(3, 1, 6, 2, 5, 4), field=f23)


@pytest.fixture(scope="session")
def parametric3_appendix(q_field):
    return builtin_model("parametric3", params=(16, 8, 5, 3, 7, 11),
                         field=q_field)
