import pytest

from convsum import corpus


@pytest.fixture(scope="session")
def shipped_corpus():
    return corpus.load_default()


@pytest.fixture(scope="session")
def verdict_entries(shipped_corpus):
    return [e for e in shipped_corpus if not e.is_power_series]


@pytest.fixture(scope="session")
def series_entries(shipped_corpus):
    return [e for e in shipped_corpus if e.is_power_series]
