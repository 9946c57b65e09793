"""Turn contextual encoder states into one static vector per corpus token.

The corpus is read and preprocessed with the primary pipeline's defaults
so the emitted table keys match its pooling lookups exactly.  Each verse
is encoded as one sequence; a token occurrence's vector is the mean of
its subword-piece states, and the exported row is the mean over all of
the token's occurrences.  Rows are keyed by token and sorted by code
point, so a fixed model revision and corpus always produce the same keys.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from divan.corpus import load_corpus, load_stopwords
from divan.embed import EmbeddingTable, save_embedding_table
from divan.errors import DataError
from divan.textprep import PrepConfig, preprocess_poem

__all__ = ["ExportJob", "export_embeddings"]

_BATCH_SIZE = 16


@dataclass
class ExportJob:
    """What to encode and where to write the table."""

    corpus_path: Path
    model_id: str
    output_path: Path
    pooling: str = "mean-over-occurrences"
    layer: int | None = None  # None selects the last encoder layer

    def __post_init__(self):
        self.corpus_path = Path(self.corpus_path)
        self.output_path = Path(self.output_path)
        if self.pooling != "mean-over-occurrences":
            raise ValueError(f"unsupported pooling mode: {self.pooling!r}")


def _load_encoder(model_id: str):
    import torch
    from transformers import AutoModel, AutoTokenizer

    try:
        tokenizer = AutoTokenizer.from_pretrained(model_id)
        model = AutoModel.from_pretrained(model_id)
    except Exception as exc:
        raise DataError(f"model unavailable: {model_id} ({exc})") from exc
    model.eval()
    torch.set_grad_enabled(False)
    return tokenizer, model


def _corpus_verses(corpus_path: Path) -> list[list[str]]:
    corpus = load_corpus(corpus_path)
    prep = PrepConfig(stopwords=load_stopwords())
    verses = []
    for book in corpus.books:
        for poem in book.poems:
            for verse in preprocess_poem(poem, prep).verses:
                if verse:
                    verses.append(list(verse))
    return verses


def export_embeddings(job: ExportJob) -> Path:
    """Encode the corpus and write the embedding TSV; returns the output path.

    The vector of a token is the mean of its contextual vectors over all
    occurrences, with the subword pieces of one occurrence averaged
    first.  The file is written atomically.
    """
    import torch

    tokenizer, model = _load_encoder(job.model_id)
    hidden_size = int(model.config.hidden_size)
    n_layers = int(model.config.num_hidden_layers)
    if job.layer is not None and not 0 <= job.layer <= n_layers:
        raise ValueError(f"layer must be in [0, {n_layers}], got {job.layer}")
    layer_index = -1 if job.layer is None else job.layer
    max_length = int(getattr(model.config, "max_position_embeddings", 512))

    verses = _corpus_verses(job.corpus_path)
    if not verses:
        raise DataError(f"token set empty: nothing survived preprocessing in {job.corpus_path}")

    sums: dict[str, np.ndarray] = {}
    counts: dict[str, int] = {}
    for start in range(0, len(verses), _BATCH_SIZE):
        batch = verses[start : start + _BATCH_SIZE]
        encoded = tokenizer(
            batch,
            is_split_into_words=True,
            padding=True,
            truncation=True,
            max_length=max_length,
            return_tensors="pt",
        )
        outputs = model(**encoded, output_hidden_states=True)
        states = outputs.hidden_states[layer_index]
        for row, tokens in enumerate(batch):
            pieces_per_word: dict[int, list[int]] = {}
            for position, word_id in enumerate(encoded.word_ids(row)):
                if word_id is not None:
                    pieces_per_word.setdefault(word_id, []).append(position)
            for word_id, positions in pieces_per_word.items():
                token = tokens[word_id]
                occurrence = states[row, positions].mean(dim=0).numpy().astype(np.float64)
                if token in sums:
                    sums[token] += occurrence
                    counts[token] += 1
                else:
                    sums[token] = occurrence.copy()
                    counts[token] = 1

    if not sums:
        raise DataError("token set empty: the tokenizer dropped every token")

    table = EmbeddingTable(
        dim=hidden_size,
        vectors={token: sums[token] / counts[token] for token in sums},
    )
    job.output_path.parent.mkdir(parents=True, exist_ok=True)
    scratch = job.output_path.with_suffix(job.output_path.suffix + ".tmp")
    save_embedding_table(table, scratch)
    os.replace(scratch, job.output_path)
    return job.output_path
