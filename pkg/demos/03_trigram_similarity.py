#!/usr/bin/env python3
"""Verse-scoped trigram histograms and the cosine-similarity heatmap.

Trigram windows never cross a verse boundary, so each poem's histogram
counts only phrases that actually occur inside single lines.  The
pairwise cosine matrix then shows which poems share phrasing.
"""

from pathlib import Path

import divan
from divan.features import build_trigram_vocabulary, extract_trigrams, similarity_matrix, trigram_bow
from divan.report import emit_heatmap
from divan.textprep import preprocess_poem

ROOT = Path(__file__).resolve().parents[1]
CORPUS = ROOT / "tests" / "data" / "fixture_corpus"
OUT = Path(__file__).resolve().parent / "output"


def main():
    OUT.mkdir(exist_ok=True)
    corpus = divan.load_corpus(CORPUS)
    config = divan.PrepConfig(stopwords=divan.load_stopwords())

    tokenized = {b.title: [preprocess_poem(p, config) for p in b.poems] for b in corpus.books}
    vocab = build_trigram_vocabulary([p for poems in tokenized.values() for p in poems])
    print(f"corpus trigram vocabulary: {len(vocab)} distinct windows")

    book = corpus.books[0]
    poems = tokenized[book.title]
    sample = extract_trigrams(poems[0])[:3]
    print(f"first windows of poem 0: {sample}")

    vectors = [trigram_bow(p, vocab) for p in poems]
    matrix = similarity_matrix(vectors)
    print(f"\ncosine matrix for {book.title}:")
    for row_label, row in zip(matrix.poem_order, matrix.values):
        cells = " ".join(f"{x:5.2f}" for x in row)
        print(f"  poem {row_label}: {cells}")
    if any(matrix.degenerate):
        flagged = [i for i, d in zip(matrix.poem_order, matrix.degenerate) if d]
        print(f"degenerate poems (no trigrams survive preprocessing): {flagged}")

    path = emit_heatmap(matrix, OUT / "similarity_heatmap.svg")
    print(f"\nwrote {path}")


if __name__ == "__main__":
    main()
