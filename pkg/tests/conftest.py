from pathlib import Path

import pytest

from qfsforge.corpus import load_corpus
from qfsforge.embed import EmbeddingProvider
from qfsforge.evidence import load_queries

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def table5_corpus():
    return load_corpus(FIXTURES / "tdqfs_table5.jsonl", "clustered")


@pytest.fixture(scope="session")
def table5_queries():
    return load_queries(FIXTURES / "tdqfs_table5_queries.jsonl")


@pytest.fixture(scope="session")
def table5_vectors():
    return EmbeddingProvider.from_vector_file(FIXTURES / "vectors_table5.txt")


@pytest.fixture(scope="session")
def fallback_provider():
    return EmbeddingProvider.hash_fallback(dimension=32, seed=7)
