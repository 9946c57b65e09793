#!/usr/bin/env python3
"""The full fusion path: topics + embeddings -> autoencoder -> clusters.

Per-poem topic mixtures are scaled by alpha=15 and concatenated with
mean-pooled token embeddings (here the deterministic hash provider
stands in for real encoder output, giving 768-dim vectors).  One
autoencoder is trained on every book's inputs, each poem is encoded to
the 16-dim latent, and clustering runs per book on those latents.
"""

from pathlib import Path

import divan
from divan.cluster import kmeans
from divan.embed import hash_provider, poem_embedding
from divan.features import build_vocabulary
from divan.fuse import build_fusion_input, encode, train_autoencoder
from divan.textprep import preprocess_poem
from divan.topics import LdaConfig, doc_topic_vector, fit_lda

ROOT = Path(__file__).resolve().parents[1]
CORPUS = ROOT / "tests" / "data" / "fixture_corpus"


def main():
    corpus = divan.load_corpus(CORPUS)
    config = divan.PrepConfig(stopwords=divan.load_stopwords())
    provider = hash_provider(dim=768, seed=42)

    tokenized = {b.title: [preprocess_poem(p, config) for p in b.poems] for b in corpus.books}

    inputs = {}
    for book in corpus.books:
        poems = tokenized[book.title]
        model = fit_lda(poems, build_vocabulary(poems), LdaConfig(k=4, seed=42))
        book_inputs = []
        for row, poem in enumerate(poems):
            pooled = poem_embedding(poem, provider)
            fused = build_fusion_input(
                doc_topic_vector(model, row), pooled.vector, alpha=15.0, poem_index=poem.poem_index
            )
            book_inputs.append(fused)
        inputs[book.title] = book_inputs
    print(f"fusion inputs: {sum(len(v) for v in inputs.values())} poems x {inputs[corpus.books[0].title][0].vector.shape[0]} dims")

    all_inputs = [fi for book in corpus.books for fi in inputs[book.title]]
    autoencoder = train_autoencoder(all_inputs, epochs=300, batch=128, seed=42)
    print(f"autoencoder loss: {autoencoder.training_log[0]:.3f} -> {autoencoder.training_log[-1]:.3f}")

    for book in corpus.books[:2]:
        latents = [encode(autoencoder, fi).vector for fi in inputs[book.title]]
        clusters = kmeans(latents, k=4, seed=42)
        print(f"\n{book.title} (latent dim {latents[0].shape[0]}):")
        for poem, label in zip(book.poems, clusters.labels):
            print(f"  cluster {label}: poem {poem.index} «{poem.title}»")


if __name__ == "__main__":
    main()
