import pytest

from reqspec.extract import load_comparator_lexicon, load_vague_terms
from reqspec.knowledge import load_seed_kb


@pytest.fixture(scope="session")
def seed_kb():
    return load_seed_kb()


@pytest.fixture(scope="session")
def lexicon():
    return load_comparator_lexicon()


@pytest.fixture(scope="session")
def vague_terms():
    return load_vague_terms()


@pytest.fixture()
def fresh_kb():
    return load_seed_kb()
