import pytest

from thetanorm.search import norm


@pytest.fixture(scope="session")
def exhaustive3():
    # one full n=3 search shared by every test that needs it (~30 s)
    return norm(3, "exhaustive")
