"""Static token vectors and mean-pooled poem embeddings.

Vectors arrive through a TSV table (typically written by the offline
exporter) or through a hash provider that derives a reproducible
unit-norm vector from a SHA-256 stream over ``(seed, token)`` -- useful
as a deterministic stand-in when no encoder output is available.
"""

from __future__ import annotations

import hashlib
import math
import struct
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DataError
from .textprep import TokenizedPoem

__all__ = [
    "EmbeddingTable",
    "HashEmbeddingProvider",
    "PoemEmbedding",
    "hash_provider",
    "load_embedding_table",
    "poem_embedding",
    "save_embedding_table",
]


@dataclass
class EmbeddingTable:
    """token → dense vector lookup with a fixed dimension."""

    dim: int
    vectors: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("embedding dimension must be at least 1")

    def get(self, token: str) -> np.ndarray | None:
        return self.vectors.get(token)

    def __len__(self) -> int:
        return len(self.vectors)


@dataclass(frozen=True)
class PoemEmbedding:
    """Mean of the table vectors of a poem's tokens (multiplicity counted)."""

    poem_index: int
    vector: np.ndarray
    covered_tokens: int
    oov_tokens: int


def load_embedding_table(path: str | Path) -> EmbeddingTable:
    """Parse an embedding TSV: ``#`` comments, ``dim<TAB>D`` header, token rows."""
    path = Path(path)
    if not path.is_file():
        raise DataError(f"embedding table not found: {path}")
    lines = path.read_text(encoding="utf-8").splitlines()

    pos = 0
    while pos < len(lines) and lines[pos].startswith("#"):
        pos += 1
    if pos >= len(lines):
        raise DataError(f"embedding table has no header: {path}")
    header = lines[pos].split()
    if len(header) != 2 or header[0] != "dim":
        raise DataError(f"malformed embedding header {lines[pos]!r} in {path}")
    try:
        dim = int(header[1])
    except ValueError as exc:
        raise DataError(f"malformed embedding header {lines[pos]!r} in {path}") from exc
    if dim < 1:
        raise DataError(f"embedding dimension must be positive, got {dim} in {path}")

    vectors: dict[str, np.ndarray] = {}
    for lineno, line in enumerate(lines[pos + 1 :], start=pos + 2):
        if not line.strip():
            continue
        fields = line.split()
        if len(fields) != dim + 1:
            raise DataError(f"{path}:{lineno}: row arity {len(fields)} != dim+1 ({dim + 1})")
        token = fields[0]
        try:
            values = np.array([float(x) for x in fields[1:]])
        except ValueError as exc:
            raise DataError(f"{path}:{lineno}: non-numeric cell") from exc
        if token in vectors:
            warnings.warn(f"duplicate token {token!r} in {path}; last occurrence wins")
        vectors[token] = values
    return EmbeddingTable(dim=dim, vectors=vectors)


def save_embedding_table(table: EmbeddingTable, path: str | Path) -> Path:
    """Write the canonical TSV form: header then rows sorted by token."""
    path = Path(path)
    lines = [f"dim\t{table.dim}"]
    for token in sorted(table.vectors):
        values = table.vectors[token]
        lines.append(token + "\t" + "\t".join(repr(float(x)) for x in values))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
    return path


def poem_embedding(poem: TokenizedPoem, table) -> PoemEmbedding:
    """Average the vectors of the poem's covered tokens; skip and count OOV.

    Tokens are accumulated in sorted order so the result is bit-identical
    under any permutation of the poem's tokens.
    """
    counts: dict[str, int] = {}
    for token in poem.flat_tokens:
        counts[token] = counts.get(token, 0) + 1
    total = np.zeros(table.dim)
    covered = 0
    oov = 0
    for token in sorted(counts):
        vector = table.get(token)
        if vector is None:
            oov += counts[token]
        else:
            total += counts[token] * vector
            covered += counts[token]
    if covered:
        total /= covered
    return PoemEmbedding(poem_index=poem.poem_index, vector=total, covered_tokens=covered, oov_tokens=oov)


class HashEmbeddingProvider:
    """Deterministic unit-norm vectors hashed from tokens; never OOV.

    Uniforms come from SHA-256 in counter mode over ``seed:token``; pairs
    feed a Box-Muller transform, and the resulting Gaussian vector is
    normalized.  The same (token, dim, seed) triple always produces the
    same vector.
    """

    def __init__(self, dim: int, seed: int = 42):
        if dim < 1:
            raise ValueError("embedding dimension must be at least 1")
        self.dim = dim
        self.seed = seed
        self._cache: dict[str, np.ndarray] = {}

    def get(self, token: str) -> np.ndarray:
        vector = self._cache.get(token)
        if vector is None:
            vector = self._derive(token)
            self._cache[token] = vector
        return vector

    def _uniforms(self, token: str, count: int) -> list[float]:
        prefix = f"{self.seed}:".encode() + token.encode("utf-8")
        out: list[float] = []
        counter = 0
        while len(out) < count:
            digest = hashlib.sha256(prefix + b":" + str(counter).encode()).digest()
            for (value,) in struct.iter_unpack(">Q", digest):
                out.append((value + 1) / 2.0**64)  # (0, 1]: keeps log() finite
            counter += 1
        return out[:count]

    def _derive(self, token: str) -> np.ndarray:
        pairs = (self.dim + 1) // 2
        uniforms = self._uniforms(token, 2 * pairs)
        values = np.empty(2 * pairs)
        for i in range(pairs):
            u1, u2 = uniforms[2 * i], uniforms[2 * i + 1]
            radius = math.sqrt(-2.0 * math.log(u1))
            values[2 * i] = radius * math.cos(2.0 * math.pi * u2)
            values[2 * i + 1] = radius * math.sin(2.0 * math.pi * u2)
        vector = values[: self.dim]
        norm = float(np.linalg.norm(vector))
        if norm == 0.0:  # unreachable in practice; keeps the unit-norm contract total
            vector = np.zeros(self.dim)
            vector[0] = 1.0
            return vector
        return vector / norm


def hash_provider(dim: int, seed: int = 42) -> HashEmbeddingProvider:
    """EmbeddingTable-compatible provider backed by seeded hashing."""
    return HashEmbeddingProvider(dim=dim, seed=seed)
