import pytest

from powerdex import conditional_table

from corpus import build_corpus


@pytest.fixture(scope="session")
def corpus():
    return build_corpus()


@pytest.fixture(scope="session")
def get_table(corpus):
    """Memoized brute conditional-expectation tables, keyed by corpus index."""
    cache = {}

    def fetch(i):
        if i not in cache:
            case = corpus[i]
            cache[i] = conditional_table(case.model, case.dist, case.e)
        return cache[i]

    return fetch
