import pytest

from oracles import angle_corpus


@pytest.fixture(scope="session")
def corpus():
    return angle_corpus(1000, seed=20240501)
