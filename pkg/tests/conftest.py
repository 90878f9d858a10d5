import pytest

from relkit.fixtures import resolve


@pytest.fixture(scope="session")
def lattice2():
    return resolve("lattice2")


@pytest.fixture(scope="session")
def z2():
    return resolve("z2")


@pytest.fixture(scope="session")
def z2cube():
    return resolve("z2cube")


@pytest.fixture(scope="session")
def baker4():
    return resolve("baker4")


@pytest.fixture(scope="session")
def lattice_2x2():
    return resolve("lattice_2x2")


@pytest.fixture(scope="session")
def lattice_n5():
    return resolve("lattice_n5")
