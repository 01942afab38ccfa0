import pytest

from gcdlab.arith import build_sieve


@pytest.fixture(scope="session")
def sieve_small():
    return build_sieve(10_000)


@pytest.fixture(scope="session")
def sieve_big():
    # covers 10**6 for the density-trend checks and 2**20 for the sweeps
    return build_sieve(1 << 20)
