import numpy as np
import pytest

from transeig import adini_basis, build_square_rect_mesh, build_structured_tri_mesh, mz_basis


@pytest.fixture(scope="session")
def adini():
    return adini_basis()


@pytest.fixture(scope="session")
def mz():
    return mz_basis()


@pytest.fixture(scope="session")
def rect_mesh_2():
    return build_square_rect_mesh(2)


@pytest.fixture(scope="session")
def tri_mesh_2():
    return build_structured_tri_mesh("square", 2)


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)
