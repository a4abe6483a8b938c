"""Shared fixtures: prime tables are expensive, so build them once."""

import pytest

from divlat import campaigns, sieve_for_count, sieve_primes


@pytest.fixture(scope="session")
def small_table():
    """Primes to 10^6 (78498 of them)."""
    return sieve_primes(10 ** 6)


@pytest.fixture(scope="session")
def medium_table():
    """Enough primes to cross a few checkpoint strides."""
    return sieve_for_count(250_000)


@pytest.fixture(scope="session")
def campaign_table():
    """Table large enough for the full hard campaign at t = 2."""
    return sieve_for_count(campaigns.hard_threshold(2))
