#!/usr/bin/env python3
"""Cluster poems by their five most frequent words.

Builds the corpus-wide vocabulary, keeps only each poem's top-5 term
counts (everything else zeroed), clusters with k-means, and projects
onto the first two principal components for a scatter plot.
"""

from pathlib import Path

import divan
from divan.cluster import kmeans, pca_project
from divan.features import build_vocabulary, top_k_bow
from divan.report import emit_scatter
from divan.textprep import preprocess_poem

ROOT = Path(__file__).resolve().parents[1]
CORPUS = ROOT / "tests" / "data" / "fixture_corpus"
OUT = Path(__file__).resolve().parent / "output"


def main():
    OUT.mkdir(exist_ok=True)
    corpus = divan.load_corpus(CORPUS)
    config = divan.PrepConfig(stopwords=divan.load_stopwords())

    tokenized = {b.title: [preprocess_poem(p, config) for p in b.poems] for b in corpus.books}
    vocab = build_vocabulary([p for poems in tokenized.values() for p in poems])
    print(f"corpus vocabulary: {len(vocab)} distinct stems")

    book = corpus.books[0]
    vectors = [top_k_bow(p, vocab, k=5) for p in tokenized[book.title]]
    data = [v.values for v in vectors]

    clusters = kmeans(data, k=4, seed=42)
    projection = pca_project(data, n_components=2)
    print(f"\n{book.title}: k-means needed {clusters.iterations_run} iterations, inertia {clusters.inertia:.3f}")
    for poem, label in zip(book.poems, clusters.labels):
        print(f"  cluster {label}: poem {poem.index} «{poem.title}»")
    print(f"explained variance of the plot: {projection.explained_variance.round(3)}")

    path = emit_scatter(projection, clusters, [p.title for p in book.poems], OUT / "top5_scatter.svg")
    print(f"\nwrote {path}")


if __name__ == "__main__":
    main()
