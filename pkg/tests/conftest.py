import pytest

from relfix.instance import load


@pytest.fixture
def ex52():
    return load("fixtures/example-5-2")


@pytest.fixture
def ex51():
    return load("fixtures/example-5-1")


@pytest.fixture
def desk():
    return load("fixtures/desk-volterra")
