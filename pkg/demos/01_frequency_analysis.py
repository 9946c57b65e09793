#!/usr/bin/env python3
"""Word-frequency analysis of one book: counts, histogram, word cloud.

Walks the first stage of the pipeline by hand: load the bundled sample
corpus, preprocess every poem of one book, merge the per-poem counts,
and render the two frequency artifacts.
"""

from pathlib import Path

import divan
from divan.features import term_frequencies
from divan.report import emit_histogram, emit_wordcloud
from divan.textprep import preprocess_poem

ROOT = Path(__file__).resolve().parents[1]
CORPUS = ROOT / "tests" / "data" / "fixture_corpus"
OUT = Path(__file__).resolve().parent / "output"


def main():
    OUT.mkdir(exist_ok=True)
    corpus = divan.load_corpus(CORPUS)
    config = divan.PrepConfig(stopwords=divan.load_stopwords())

    book = corpus.books[0]
    print(f"book: {book.title} ({len(book.poems)} poems)")

    frequencies = {}
    for poem in book.poems:
        tokens = preprocess_poem(poem, config)
        print(f"  poem {poem.index} «{poem.title}»: {len(tokens.flat_tokens)} tokens after preprocessing")
        for term, count in term_frequencies(tokens).items():
            frequencies[term] = frequencies.get(term, 0) + count

    top = sorted(frequencies.items(), key=lambda kv: (-kv[1], kv[0]))[:10]
    print("\nmost frequent stems:")
    for term, count in top:
        print(f"  {count:3d}  {term}")

    histogram = emit_histogram(frequencies, top_n=10, path=OUT / "frequency_histogram.svg", title=book.title)
    cloud = emit_wordcloud(frequencies, OUT / "wordcloud.svg")
    print(f"\nwrote {histogram}")
    print(f"wrote {cloud}")


if __name__ == "__main__":
    main()
