"""Vocabularies, per-poem feature vectors, and cosine-similarity matrices.

Feature spaces: raw term frequencies, top-k bag-of-words (counts of a
poem's k most frequent terms, zero elsewhere), and verse-scoped trigram
histograms.  Similarity is the cosine of the angle between two vectors;
all-zero vectors (poems emptied by stop-word removal) compare as 0 and
are flagged on the matrix.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Hashable, Sequence

import numpy as np

from .errors import DataError
from .textprep import TokenizedPoem

__all__ = [
    "FeatureVector",
    "SimilarityMatrix",
    "Vocabulary",
    "build_trigram_vocabulary",
    "build_vocabulary",
    "cosine_similarity",
    "export_features_csv",
    "export_similarity_csv",
    "extract_trigrams",
    "similarity_matrix",
    "term_frequencies",
    "top_k_bow",
    "trigram_bow",
]

Trigram = tuple[str, str, str]


@dataclass(frozen=True)
class Vocabulary:
    """Unique terms (unigrams or trigram triples) in first-occurrence order."""

    terms: tuple[Hashable, ...]

    @cached_property
    def index(self) -> dict[Hashable, int]:
        return {term: i for i, term in enumerate(self.terms)}

    def __len__(self) -> int:
        return len(self.terms)

    def __contains__(self, term: Hashable) -> bool:
        return term in self.index


@dataclass(frozen=True)
class FeatureVector:
    """Dense non-negative feature values for one poem, aligned to a vocabulary."""

    poem_index: int
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        if values.ndim != 1:
            raise ValueError("feature values must be one-dimensional")
        if np.any(values < 0):
            raise ValueError("feature values must be non-negative")


@dataclass(frozen=True)
class SimilarityMatrix:
    """Pairwise cosine similarities; ``degenerate[i]`` marks all-zero inputs."""

    values: np.ndarray
    poem_order: tuple[int, ...]
    degenerate: tuple[bool, ...]


def build_vocabulary(poems: Sequence[TokenizedPoem]) -> Vocabulary:
    """Collect unique tokens over all poems, first occurrence first."""
    if not poems:
        raise DataError("cannot build a vocabulary from zero poems")
    seen: dict[str, None] = {}
    for poem in poems:
        for token in poem.flat_tokens:
            seen.setdefault(token, None)
    if not seen:
        raise DataError("empty corpus vocabulary: no tokens survived preprocessing")
    return Vocabulary(terms=tuple(seen))


def build_trigram_vocabulary(poems: Sequence[TokenizedPoem]) -> Vocabulary:
    """Collect unique verse-scoped trigrams over all poems, first occurrence first."""
    if not poems:
        raise DataError("cannot build a vocabulary from zero poems")
    seen: dict[Trigram, None] = {}
    for poem in poems:
        for trigram in extract_trigrams(poem):
            seen.setdefault(trigram, None)
    if not seen:
        raise DataError("empty trigram vocabulary: no verse has three tokens")
    return Vocabulary(terms=tuple(seen))


def term_frequencies(poem: TokenizedPoem) -> dict[str, int]:
    """Token counts over the whole poem, keyed in first-occurrence order."""
    return dict(Counter(poem.flat_tokens))


def top_k_bow(poem: TokenizedPoem, vocab: Vocabulary, k: int = 5) -> FeatureVector:
    """Counts of the poem's k most frequent terms at their vocabulary slots.

    Ties at the cut-off rank are broken by first occurrence in the poem.
    Poems with fewer than k distinct terms keep all of them.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    counts = Counter(poem.flat_tokens)
    for term in counts:
        if term not in vocab:
            raise DataError(f"token not in vocabulary: {term!r}")
    first_pos = {}
    for pos, token in enumerate(poem.flat_tokens):
        first_pos.setdefault(token, pos)
    ranked = sorted(counts, key=lambda t: (-counts[t], first_pos[t]))[:k]
    values = np.zeros(len(vocab))
    for term in ranked:
        values[vocab.index[term]] = counts[term]
    return FeatureVector(poem_index=poem.poem_index, values=values)


def extract_trigrams(poem: TokenizedPoem) -> list[Trigram]:
    """Width-3 sliding windows inside each verse; no cross-verse windows."""
    trigrams = []
    for verse in poem.verses:
        for i in range(len(verse) - 2):
            trigrams.append((verse[i], verse[i + 1], verse[i + 2]))
    return trigrams


def trigram_bow(poem: TokenizedPoem, trigram_vocab: Vocabulary) -> FeatureVector:
    """Histogram of the poem's trigrams over a trigram vocabulary."""
    values = np.zeros(len(trigram_vocab))
    for trigram in extract_trigrams(poem):
        if trigram not in trigram_vocab:
            raise DataError(f"trigram not in vocabulary: {trigram!r}")
        values[trigram_vocab.index[trigram]] += 1
    return FeatureVector(poem_index=poem.poem_index, values=values)


def _as_array(vector) -> np.ndarray:
    values = vector.values if isinstance(vector, FeatureVector) else vector
    return np.asarray(values, dtype=float)


def cosine_similarity(a, b) -> float:
    """A·B / (‖A‖·‖B‖); 0.0 when either vector is all-zero."""
    va, vb = _as_array(a), _as_array(b)
    if va.shape != vb.shape:
        raise ValueError(f"length mismatch: {va.shape} vs {vb.shape}")
    norm_a = float(np.linalg.norm(va))
    norm_b = float(np.linalg.norm(vb))
    if norm_a == 0.0 or norm_b == 0.0:
        return 0.0
    return float(np.dot(va, vb) / (norm_a * norm_b))


def similarity_matrix(vectors: Sequence[FeatureVector]) -> SimilarityMatrix:
    """Pairwise cosine matrix over poem vectors, exactly symmetric."""
    if not vectors:
        raise ValueError("need at least one vector")
    data = np.vstack([_as_array(v) for v in vectors])
    norms = np.linalg.norm(data, axis=1)
    degenerate = norms == 0.0
    safe = np.where(degenerate, 1.0, norms)
    unit = data / safe[:, None]
    values = np.clip(unit @ unit.T, -1.0, 1.0)
    # Upper triangle is authoritative: forces bit-exact symmetry.
    values = np.triu(values) + np.triu(values, 1).T
    diag = np.where(degenerate, 0.0, 1.0)
    np.fill_diagonal(values, diag)
    order = tuple(int(v.poem_index) for v in vectors)
    return SimilarityMatrix(values=values, poem_order=order, degenerate=tuple(bool(d) for d in degenerate))


def _fmt(x: float) -> str:
    return format(float(x), ".9g")


def export_similarity_csv(matrix: SimilarityMatrix, path: str | Path) -> Path:
    """Write the matrix as CSV with poem indices as header and row labels."""
    path = Path(path)
    lines = ["poem_index," + ",".join(str(i) for i in matrix.poem_order)]
    for label, row in zip(matrix.poem_order, matrix.values):
        lines.append(f"{label}," + ",".join(_fmt(x) for x in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
    return path


def export_features_csv(vectors: Sequence[FeatureVector], path: str | Path) -> Path:
    """Write feature vectors as CSV columns, one column per poem."""
    if not vectors:
        raise ValueError("need at least one vector")
    arrays = [_as_array(v) for v in vectors]
    length = len(arrays[0])
    if any(len(a) != length for a in arrays):
        raise ValueError("feature vectors have mismatched lengths")
    path = Path(path)
    lines = ["term_index," + ",".join(str(v.poem_index) for v in vectors)]
    for j in range(length):
        lines.append(f"{j}," + ",".join(_fmt(a[j]) for a in arrays))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
    return path
