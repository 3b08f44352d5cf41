import pytest
from hypothesis import settings

from wdest import code as codes
from wdest.rng import BitSource

settings.register_profile("ci", max_examples=60, deadline=None)
settings.load_profile("ci")


@pytest.fixture
def hamming():
    return codes.hamming74()


@pytest.fixture(scope="session")
def bch33():
    return codes.bch_33_13()


@pytest.fixture(scope="session")
def random_16_8():
    return codes.random_code(16, 8, BitSource(16, 8))


@pytest.fixture(scope="session")
def random_33_13():
    return codes.random_code(33, 13, BitSource(33, 13))


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for num in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[num])
