"""Report emission and end-to-end pipeline orchestration.

Emitters turn computed results into deterministic SVG/CSV artifacts;
``run_pipeline`` wires corpus loading, preprocessing, the selected
feature stages, clustering, and projection into a per-book report bundle
with a ``run.meta`` manifest (config echo plus SHA-256 per artifact).
Identical configuration and seeds produce byte-identical bundles.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Mapping, Sequence

from . import cluster as _cluster
from . import embed as _embed
from . import features as _features
from . import fuse as _fuse
from . import topics as _topics
from .corpus import Book, load_corpus, load_stopwords
from .errors import DataError, PipelineError
from .svg import PALETTE, SvgDoc, fmt, lerp_color
from .textprep import PrepConfig, TokenizedPoem, load_lemma_dictionary, preprocess_poem

__all__ = [
    "ALL_STAGES",
    "ReportBundle",
    "RunConfig",
    "emit_heatmap",
    "emit_histogram",
    "emit_scatter",
    "emit_wordcloud",
    "run_pipeline",
]

ALL_STAGES = ("freq", "top5", "trigram", "similarity", "lda", "fused")

_HEAT_LOW = (247, 251, 255)
_HEAT_HIGH = (8, 48, 107)
_WORDCLOUD_MAX_WORDS = 40
_WORDCLOUD_MIN_FONT = 12.0
_WORDCLOUD_MAX_FONT = 44.0


@dataclass
class RunConfig:
    """Pipeline configuration; defaults are the pinned experiment constants."""

    corpus_path: Path
    out_dir: Path
    stages: tuple[str, ...] = ALL_STAGES
    stopword_path: Path | None = None
    lemma_dict_path: Path | None = None
    reduction_mode: str = "stem"
    feature_mode: str = "fused"
    k_clusters: int = 4
    k_topics: int = 4
    alpha: float = 15.0
    embedding_table_path: Path | None = None
    hash_embeddings: bool = False
    hash_dim: int = 768
    hash_seed: int = 42
    lda_seed: int = 42
    kmeans_seed: int = 42
    autoencoder_seed: int = 42
    epochs: int = 1000
    batch_size: int = 128
    top_words: int = 15

    def __post_init__(self):
        self.corpus_path = Path(self.corpus_path)
        self.out_dir = Path(self.out_dir)
        unknown = [s for s in self.stages if s not in ALL_STAGES]
        if unknown:
            raise ValueError(f"unknown pipeline stages: {unknown}")
        if self.feature_mode not in ("top5", "trigram", "fused"):
            raise ValueError(f"unknown feature mode: {self.feature_mode!r}")
        if "fused" in self.stages and not (self.hash_embeddings or self.embedding_table_path):
            raise ValueError("fused stage requires an embedding table or hash embeddings")


@dataclass(frozen=True)
class ReportBundle:
    """Emitted artifact manifest: relative paths plus their content hashes."""

    out_dir: Path
    artifacts: tuple[str, ...]
    hashes: Mapping[str, str]
    meta_path: Path


# ---------------------------------------------------------------------------
# Emitters


def emit_histogram(frequencies: Mapping[str, int], top_n: int, path: str | Path, title: str = "") -> Path:
    """Bar chart of the ``top_n`` most frequent terms, counts labeled."""
    if not frequencies:
        raise DataError("cannot draw a histogram of zero frequencies")
    items = sorted(frequencies.items(), key=lambda kv: (-kv[1], kv[0]))[: max(1, top_n)]
    bar_w, gap, plot_h = 34.0, 12.0, 260.0
    margin_l, margin_r, margin_t, margin_b = 20.0, 20.0, 40.0, 60.0
    width = margin_l + len(items) * (bar_w + gap) + margin_r
    height = margin_t + plot_h + margin_b
    peak = items[0][1]

    doc = SvgDoc(width, height)
    if title:
        doc.text(width / 2, 20, title, text_anchor="middle", font_size="14", direction="rtl")
    baseline = margin_t + plot_h
    doc.line(margin_l, baseline, width - margin_r, baseline)
    for i, (term, count) in enumerate(items):
        x = margin_l + i * (bar_w + gap) + gap / 2
        h = plot_h * count / peak
        doc.rect(x, baseline - h, bar_w, h, fill="#4477aa", **{"class": "bar"})
        doc.text(x + bar_w / 2, baseline - h - 4, str(count), text_anchor="middle", font_size="10", **{"class": "bar-value"})
        doc.text(x + bar_w / 2, baseline + 16, term, text_anchor="middle", font_size="11", direction="rtl", **{"class": "bar-label"})
    return doc.write(path)


def _spiral_offsets(step: float, limit: int):
    """Outward rectangular spiral on a ``step``-sized grid, starting at the origin."""
    yield 0.0, 0.0
    x = y = 0
    leg = 1
    emitted = 1
    directions = ((1, 0), (0, -1), (-1, 0), (0, 1))
    d = 0
    while emitted < limit:
        for _ in range(2):
            dx, dy = directions[d % 4]
            for _ in range(leg):
                x += dx
                y += dy
                emitted += 1
                yield x * step, y * step
                if emitted >= limit:
                    return
            d += 1
        leg += 1


def _boxes_overlap(a, b, pad: float = 0.0) -> bool:
    return not (
        a[2] + pad <= b[0]
        or b[2] <= a[0] - pad
        or a[3] + pad <= b[1]
        or b[3] <= a[1] - pad
    )


def emit_wordcloud(
    frequencies: Mapping[str, int],
    path: str | Path,
    min_font: float = _WORDCLOUD_MIN_FONT,
    max_font: float = _WORDCLOUD_MAX_FONT,
    max_words: int = _WORDCLOUD_MAX_WORDS,
) -> Path:
    """Greedy spiral word cloud; font size is linear in term frequency.

    Words are placed in descending frequency order on an outward
    rectangular spiral; a word lands on the first spot where its estimated
    bounding box clears every box already placed.  The boxes are embedded
    as ``data-box`` attributes so layouts can be audited.
    """
    if not frequencies:
        raise DataError("cannot draw a word cloud of zero frequencies")
    items = sorted(frequencies.items(), key=lambda kv: (-kv[1], kv[0]))[:max_words]
    c_max = items[0][1]
    c_min = items[-1][1]

    def font_size(count: int) -> float:
        if c_max == c_min:
            return max_font
        frac = (count - c_min) / (c_max - c_min)
        return min_font + frac * (max_font - min_font)

    placed = []  # (term, count, size, cx, cy, box)
    boxes = []
    for term, count in items:
        size = font_size(count)
        w = max(1, len(term)) * size * 0.62
        h = size * 1.15
        spot = None
        for ox, oy in _spiral_offsets(step=6.0, limit=40000):
            candidate = (ox - w / 2, oy - h / 2, ox + w / 2, oy + h / 2)
            if not any(_boxes_overlap(candidate, other, pad=2.0) for other in boxes):
                spot = (ox, oy, candidate)
                break
        if spot is None:
            raise DataError(f"word-cloud layout overflow placing {term!r}")
        cx, cy, box = spot
        placed.append((term, count, size, cx, cy, box))
        boxes.append(box)

    pad = 12.0
    min_x = min(b[0] for b in boxes) - pad
    min_y = min(b[1] for b in boxes) - pad
    max_x = max(b[2] for b in boxes) + pad
    max_y = max(b[3] for b in boxes) + pad
    doc = SvgDoc(max_x - min_x, max_y - min_y)
    for i, (term, count, size, cx, cy, box) in enumerate(placed):
        shifted = (box[0] - min_x, box[1] - min_y, box[2] - min_x, box[3] - min_y)
        doc.text(
            cx - min_x,
            cy - min_y,
            term,
            text_anchor="middle",
            dominant_baseline="central",
            direction="rtl",
            font_size=fmt(size),
            fill=PALETTE[i % len(PALETTE)],
            **{
                "class": "word",
                "data-count": str(count),
                "data-box": " ".join(fmt(v) for v in shifted),
            },
        )
    return doc.write(path)


def emit_heatmap(matrix: _features.SimilarityMatrix, path: str | Path) -> Path:
    """n×n similarity grid, color linear in value over [0, 1], with a legend."""
    n = len(matrix.poem_order)
    cell = 26.0
    margin_l, margin_t = 46.0, 46.0
    legend_w = 86.0
    width = margin_l + n * cell + legend_w
    height = margin_t + n * cell + 20.0

    doc = SvgDoc(width, height)
    for i, row_label in enumerate(matrix.poem_order):
        doc.text(margin_l - 6, margin_t + i * cell + cell / 2 + 4, str(row_label), text_anchor="end", font_size="10")
        doc.text(margin_l + i * cell + cell / 2, margin_t - 8, str(matrix.poem_order[i]), text_anchor="middle", font_size="10")
        for j in range(n):
            value = float(matrix.values[i, j])
            doc.rect(
                margin_l + j * cell,
                margin_t + i * cell,
                cell,
                cell,
                fill=lerp_color(_HEAT_LOW, _HEAT_HIGH, value),
                stroke="#ffffff",
                **{"class": "cell", "data-value": format(value, ".9g")},
            )
    legend_x = margin_l + n * cell + 18.0
    doc.text(legend_x, margin_t - 8, "cosine", font_size="10")
    steps = 5
    for s in range(steps + 1):
        value = s / steps
        y = margin_t + (steps - s) * 24.0
        doc.rect(legend_x, y, 18, 18, fill=lerp_color(_HEAT_LOW, _HEAT_HIGH, value), stroke="#999999", **{"class": "legend-swatch"})
        doc.text(legend_x + 24, y + 13, format(value, ".1f"), font_size="10")
    return doc.write(path)


def emit_scatter(
    projection: _cluster.Projection2D,
    labels: _cluster.ClusterAssignment,
    titles: Sequence[str],
    path: str | Path,
) -> Path:
    """One marker per poem in PCA coordinates, colored by cluster id."""
    coords = projection.coords
    if coords.shape[0] != len(labels.labels):
        raise ValueError("projection rows do not match label count")
    if len(titles) != coords.shape[0]:
        raise ValueError("title count does not match projection rows")

    plot_w, plot_h = 380.0, 320.0
    margin_l, margin_t = 50.0, 30.0
    legend_w = 120.0
    width = margin_l + plot_w + legend_w + 20.0
    height = margin_t + plot_h + 50.0

    xs = coords[:, 0]
    ys = coords[:, 1]
    x_lo, x_hi = float(xs.min()), float(xs.max())
    y_lo, y_hi = float(ys.min()), float(ys.max())
    x_span = (x_hi - x_lo) or 1.0
    y_span = (y_hi - y_lo) or 1.0
    x_lo -= 0.05 * x_span
    y_lo -= 0.05 * y_span
    x_span *= 1.1
    y_span *= 1.1

    def sx(x: float) -> float:
        return margin_l + (x - x_lo) / x_span * plot_w

    def sy(y: float) -> float:
        return margin_t + plot_h - (y - y_lo) / y_span * plot_h

    doc = SvgDoc(width, height)
    doc.rect(margin_l, margin_t, plot_w, plot_h, fill="none", stroke="#888888")
    doc.text(margin_l + plot_w / 2, margin_t + plot_h + 30, "pc1", text_anchor="middle", font_size="11")
    doc.text(16, margin_t + plot_h / 2, "pc2", font_size="11")
    for i in range(coords.shape[0]):
        label = labels.labels[i]
        cx, cy = sx(float(xs[i])), sy(float(ys[i]))
        doc.circle(
            cx,
            cy,
            5,
            title=titles[i],
            fill=PALETTE[label % len(PALETTE)],
            **{"class": "marker", "data-cluster": str(label)},
        )
        doc.text(cx + 7, cy + 4, str(i), font_size="9", **{"class": "marker-label"})
    legend_x = margin_l + plot_w + 16.0
    doc.text(legend_x, margin_t, "clusters", font_size="11")
    for row, label in enumerate(sorted(set(labels.labels))):
        y = margin_t + 14 + row * 20.0
        doc.rect(legend_x, y, 12, 12, fill=PALETTE[label % len(PALETTE)], **{"class": "legend-swatch"})
        doc.text(legend_x + 18, y + 10, f"cluster {label}", font_size="10")
    return doc.write(path)


# ---------------------------------------------------------------------------
# Pipeline


def _merged_frequencies(poems: Sequence[TokenizedPoem]) -> dict[str, int]:
    merged: dict[str, int] = {}
    for poem in poems:
        for term, count in _features.term_frequencies(poem).items():
            merged[term] = merged.get(term, 0) + count
    return merged


def _export_frequencies_csv(frequencies: Mapping[str, int], path: Path):
    lines = ["term,count"]
    for term, count in sorted(frequencies.items(), key=lambda kv: (-kv[1], kv[0])):
        lines.append(f"{term},{count}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def _config_echo(config: RunConfig) -> list[str]:
    # out_dir is deliberately excluded: a bundle's bytes must not depend on
    # where it was written.
    lines = []
    for f in sorted(fields(config), key=lambda f: f.name):
        if f.name == "out_dir":
            continue
        value = getattr(config, f.name)
        if isinstance(value, tuple):
            value = ",".join(str(v) for v in value)
        lines.append(f"{f.name} = {value}")
    return lines


class _Emitter:
    """Tracks emitted files so a failed run can clean up after itself."""

    def __init__(self, out_dir: Path):
        self.out_dir = out_dir
        self.written: list[Path] = []
        self.artifacts: list[str] = []

    def path(self, relpath: str) -> Path:
        path = self.out_dir / relpath
        path.parent.mkdir(parents=True, exist_ok=True)
        self.written.append(path)
        self.artifacts.append(relpath)
        return path

    def cleanup(self):
        for path in self.written:
            path.unlink(missing_ok=True)


def run_pipeline(config: RunConfig) -> ReportBundle:
    """Execute the configured stages and write one report bundle.

    Raises :class:`PipelineError` naming the failing stage; partially
    written artifacts are removed before the error propagates.
    """
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    emitter = _Emitter(out_dir)
    stage = "setup"
    try:
        stage = "load"
        corpus = load_corpus(config.corpus_path)
        stopwords = load_stopwords(config.stopword_path)
        lemma = load_lemma_dictionary(config.lemma_dict_path) if config.lemma_dict_path else None
        prep = PrepConfig(stopwords=stopwords, reduction_mode=config.reduction_mode, lemma_dictionary=lemma)

        stage = "preprocess"
        tokenized: dict[str, list[TokenizedPoem]] = {}
        for book in corpus.books:
            tokenized[book.title] = [preprocess_poem(p, prep) for p in book.poems]

        if "freq" in config.stages:
            stage = "freq"
            for book in corpus.books:
                frequencies = _merged_frequencies(tokenized[book.title])
                if not frequencies:
                    raise DataError(f"book {book.title!r} has no tokens after preprocessing")
                emit_histogram(frequencies, config.top_words, emitter.path(f"{book.title}/frequency_histogram.svg"), title=book.title)
                emit_wordcloud(frequencies, emitter.path(f"{book.title}/wordcloud.svg"))
                _export_frequencies_csv(frequencies, emitter.path(f"{book.title}/term_frequencies.csv"))

        if "top5" in config.stages:
            stage = "top5"
            vocab = _features.build_vocabulary([p for ps in tokenized.values() for p in ps])
            for book in corpus.books:
                vectors = [_features.top_k_bow(p, vocab, k=5) for p in tokenized[book.title]]
                _cluster_and_emit(book, vectors, config, emitter, prefix="top5")

        trigram_vocab = None
        if "trigram" in config.stages or "similarity" in config.stages:
            stage = "trigram-vocabulary"
            trigram_vocab = _features.build_trigram_vocabulary([p for ps in tokenized.values() for p in ps])

        if "trigram" in config.stages:
            stage = "trigram"
            for book in corpus.books:
                vectors = [_features.trigram_bow(p, trigram_vocab) for p in tokenized[book.title]]
                _cluster_and_emit(book, vectors, config, emitter, prefix="trigram")

        if "similarity" in config.stages:
            stage = "similarity"
            for book in corpus.books:
                vectors = [_features.trigram_bow(p, trigram_vocab) for p in tokenized[book.title]]
                matrix = _features.similarity_matrix(vectors)
                _features.export_similarity_csv(matrix, emitter.path(f"{book.title}/trigram_similarity.csv"))
                emit_heatmap(matrix, emitter.path(f"{book.title}/similarity_heatmap.svg"))

        book_models: dict[str, _topics.TopicModel] = {}
        if "lda" in config.stages or "fused" in config.stages:
            stage = "lda"
            for book in corpus.books:
                poems = tokenized[book.title]
                vocab = _features.build_vocabulary(poems)
                model = _topics.fit_lda(poems, vocab, _topics.LdaConfig(k=config.k_topics, seed=config.lda_seed))
                book_models[book.title] = model
                if "lda" in config.stages:
                    _topics.export_theta_csv(model, emitter.path(f"{book.title}/lda_theta.csv"))
                    _export_top_words_csv(model, vocab, emitter.path(f"{book.title}/lda_top_words.csv"), config.top_words)

        if "fused" in config.stages:
            stage = "embed"
            if config.embedding_table_path:
                table = _embed.load_embedding_table(config.embedding_table_path)
            else:
                table = _embed.hash_provider(config.hash_dim, config.hash_seed)

            stage = "fuse"
            inputs: dict[str, list[_fuse.FusionInput]] = {}
            for book in corpus.books:
                model = book_models[book.title]
                book_inputs = []
                for row, poem in enumerate(tokenized[book.title]):
                    pooled = _embed.poem_embedding(poem, table)
                    book_inputs.append(
                        _fuse.build_fusion_input(
                            _topics.doc_topic_vector(model, row),
                            pooled.vector,
                            alpha=config.alpha,
                            expected_topics=config.k_topics,
                            poem_index=poem.poem_index,
                        )
                    )
                inputs[book.title] = book_inputs

            # Trained once on every book's poems; encoding is then per book.
            all_inputs = [fi for book in corpus.books for fi in inputs[book.title]]
            autoencoder = _fuse.train_autoencoder(
                all_inputs, epochs=config.epochs, batch=config.batch_size, seed=config.autoencoder_seed
            )
            _fuse.export_loss_csv(autoencoder, emitter.path("autoencoder_loss.csv"))
            _fuse.save_autoencoder(autoencoder, emitter.path("autoencoder_weights.txt"))

            stage = "fused"
            for book in corpus.books:
                latents = [_fuse.encode(autoencoder, fi) for fi in inputs[book.title]]
                vectors = [lat.vector for lat in latents]
                assignment, projection = _cluster_and_emit(book, vectors, config, emitter, prefix="fused", raw_vectors=True)
                for cluster_id in sorted(set(assignment.labels)):
                    members = [p for p, lab in zip(tokenized[book.title], assignment.labels) if lab == cluster_id]
                    frequencies = _merged_frequencies(members)
                    if frequencies:
                        emit_wordcloud(frequencies, emitter.path(f"{book.title}/topic_{cluster_id}_wordcloud.svg"))

        stage = "manifest"
        hashes = {}
        for relpath in sorted(emitter.artifacts):
            digest = hashlib.sha256((out_dir / relpath).read_bytes()).hexdigest()
            hashes[relpath] = digest
        # sha256sum layout: the digest never contains spaces, paths may.
        meta_lines = ["divan-run v1", "[config]", *_config_echo(config), "[artifacts]"]
        meta_lines += [f"{hashes[relpath]}  {relpath}" for relpath in sorted(hashes)]
        meta_path = out_dir / "run.meta"
        meta_path.write_text("\n".join(meta_lines) + "\n", encoding="utf-8", newline="\n")
    except Exception as exc:
        emitter.cleanup()
        (out_dir / "run.meta").unlink(missing_ok=True)
        raise PipelineError(stage, exc) from exc

    return ReportBundle(
        out_dir=out_dir,
        artifacts=tuple(sorted(emitter.artifacts)),
        hashes=hashes,
        meta_path=meta_path,
    )


def _export_top_words_csv(model: _topics.TopicModel, vocab: _features.Vocabulary, path: Path, n: int):
    lines = ["topic,rank,term,probability"]
    for t in range(model.k):
        for rank, term in enumerate(_topics.topic_top_words(model, t, n, vocab)):
            prob = float(model.phi[t, vocab.index[term]])
            lines.append(f"{t},{rank},{term},{format(prob, '.9g')}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def _cluster_and_emit(
    book: Book,
    vectors,
    config: RunConfig,
    emitter: _Emitter,
    prefix: str,
    raw_vectors: bool = False,
):
    """K-means + PCA + scatter/CSV artifacts for one book and one feature space."""
    data = vectors if raw_vectors else [v.values for v in vectors]
    assignment = _cluster.kmeans(data, k=config.k_clusters, seed=config.kmeans_seed)
    projection = _cluster.pca_project(data, n_components=2)
    poem_indices = [p.index for p in book.poems]
    titles = [p.title for p in book.poems]
    _cluster.export_assignments_csv(assignment, poem_indices, emitter.path(f"{book.title}/{prefix}_assignments.csv"))
    _cluster.export_projection_csv(projection, poem_indices, emitter.path(f"{book.title}/{prefix}_projection.csv"))
    emit_scatter(projection, assignment, titles, emitter.path(f"{book.title}/{prefix}_scatter.svg"))
    return assignment, projection
