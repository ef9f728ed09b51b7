"""Shared fixtures and the hypothesis profile for the suite."""

import hypothesis
import numpy as np
import pytest

from surfrep import build_corpus, obstructed_instance, smooth_instance

hypothesis.settings.register_profile(
    "surfrep",
    max_examples=20,
    deadline=None,
    suppress_health_check=[hypothesis.HealthCheck.too_slow],
)
hypothesis.settings.load_profile("surfrep")


@pytest.fixture(scope="session")
def corpus():
    """The standing instance set: 15 shapes x 4 seeds, all certified smooth."""
    return build_corpus(seeds_per_shape=4)


@pytest.fixture(scope="session")
def witness_u2():
    # once-punctured torus, rank 2, generic class
    return smooth_instance(1, 2, 1)


@pytest.fixture(scope="session")
def witness_u2_sphere():
    # 4-punctured sphere, rank 2
    return smooth_instance(0, 2, 4)


@pytest.fixture(scope="session")
def witness_u1():
    # genus 2, rank 1, three punctures
    return smooth_instance(2, 1, 3)


@pytest.fixture(scope="session")
def witness_u3():
    # once-punctured torus, rank 3
    return smooth_instance(1, 3, 1)


@pytest.fixture(scope="session")
def obstructed():
    """(representation, direction) pair whose extension stops at order 2."""
    return obstructed_instance()


@pytest.fixture()
def rng():
    return np.random.default_rng(7)
