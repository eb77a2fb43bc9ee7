import numpy as np
import pytest

from tcone import build_builtin


@pytest.fixture(scope="session")
def vinberg():
    return build_builtin("vinberg5")


@pytest.fixture(scope="session")
def orthant4():
    return build_builtin("orthant", 4)


@pytest.fixture(scope="session")
def psd3():
    return build_builtin("psd", 3)


@pytest.fixture(scope="session")
def builtin_algebras(vinberg, orthant4, psd3):
    return [orthant4, psd3, vinberg]


def rng_for(seed):
    return np.random.default_rng(seed)
