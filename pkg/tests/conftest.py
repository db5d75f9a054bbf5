import pytest
from hypothesis import settings

from polyext.radial_field import RhoGrid, make_test_function

settings.register_profile("polyext", deadline=None, max_examples=40, derandomize=True)
settings.load_profile("polyext")


@pytest.fixture(scope="session")
def grids():
    cache = {}

    def get(n):
        if n not in cache:
            cache[n] = RhoGrid.build(n)
        return cache[n]
    return get


@pytest.fixture(scope="session")
def gaussian(grids):
    return lambda n: make_test_function("gaussian", None, grids(n))
