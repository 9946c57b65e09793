from pathlib import Path

import numpy as np
import pytest

import divan
from divan.textprep import TokenizedPoem, preprocess_poem

DATA_DIR = Path(__file__).parent / "data"
FIXTURE_CORPUS = DATA_DIR / "fixture_corpus"


def make_poem(index, *verses):
    """TokenizedPoem from explicit per-verse token lists."""
    return TokenizedPoem(poem_index=index, verses=tuple(tuple(v) for v in verses))


def make_topic_corpus(n_docs=200, doc_len=50, words_per_topic=25, n_topics=4, seed=7):
    """Synthetic corpus drawn from disjoint per-topic vocabularies.

    Returns (poems, vocabulary, generating labels); the labels are the
    independent oracle for recovery scoring.
    """
    rng = np.random.default_rng(seed)
    words = [f"w{i:03d}" for i in range(n_topics * words_per_topic)]
    poems, labels = [], []
    for d in range(n_docs):
        topic = int(rng.integers(0, n_topics))
        labels.append(topic)
        tokens = tuple(
            words[topic * words_per_topic + int(rng.integers(0, words_per_topic))]
            for _ in range(doc_len)
        )
        poems.append(make_poem(d, tokens))
    return poems, divan.Vocabulary(terms=tuple(words)), labels


def best_permutation_accuracy(predicted, truth, n_labels):
    """Max accuracy over all label permutations (brute force)."""
    from itertools import permutations

    best = 0.0
    for perm in permutations(range(n_labels)):
        hits = sum(1 for p, t in zip(predicted, truth) if perm[p] == t)
        best = max(best, hits / len(truth))
    return best


@pytest.fixture(scope="session")
def corpus():
    return divan.load_corpus(FIXTURE_CORPUS)


@pytest.fixture(scope="session")
def stopwords():
    return divan.load_stopwords()


@pytest.fixture(scope="session")
def prep_config(stopwords):
    return divan.PrepConfig(stopwords=stopwords)


@pytest.fixture(scope="session")
def tokenized(corpus, prep_config):
    return {
        book.title: [preprocess_poem(p, prep_config) for p in book.poems]
        for book in corpus.books
    }


@pytest.fixture(scope="session")
def all_tokenized(tokenized):
    return [p for poems in tokenized.values() for p in poems]
