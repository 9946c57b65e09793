#!/usr/bin/env python3
"""Fit a four-topic model per book with the collapsed Gibbs sampler.

Every poem is one document.  The sampler stops on its own once the
log-likelihood plateaus; the per-poem topic mixtures (theta) and the
highest-probability words per topic come straight from the fitted
counts.
"""

from pathlib import Path

import divan
from divan.features import build_vocabulary
from divan.textprep import preprocess_poem
from divan.topics import LdaConfig, doc_topic_vector, fit_lda, topic_top_words

ROOT = Path(__file__).resolve().parents[1]
CORPUS = ROOT / "tests" / "data" / "fixture_corpus"


def main():
    corpus = divan.load_corpus(CORPUS)
    config = divan.PrepConfig(stopwords=divan.load_stopwords())

    for book in corpus.books[:2]:
        poems = [preprocess_poem(p, config) for p in book.poems]
        vocab = build_vocabulary(poems)
        model = fit_lda(poems, vocab, LdaConfig(k=4, seed=42))
        print(f"\n{book.title}: |V|={len(vocab)}, converged after {model.iterations_run} sweeps")
        print(f"  final log-likelihood: {model.log_likelihood_trace[-1]:.1f}")
        for t in range(model.k):
            words = "، ".join(topic_top_words(model, t, 4, vocab))
            print(f"  topic {t}: {words}")
        for poem in book.poems:
            theta = doc_topic_vector(model, poem.index)
            mix = " ".join(f"{x:.2f}" for x in theta)
            print(f"  poem {poem.index} «{poem.title}»: theta = [{mix}]")


if __name__ == "__main__":
    main()
