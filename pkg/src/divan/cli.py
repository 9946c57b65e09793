"""Command-line interface.

Subcommands mirror the report groupings: ``freq``, ``cluster-top5``,
``cluster-trigram``, ``similarity``, ``lda``, ``fuse-cluster``, and
``report-all``.  Options may come from a ``key = value`` config file
(``--config``); explicit flags override file values.  Exit codes:
0 success, 1 usage error, 2 data error, 3 numeric divergence.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import DivanError, DivergenceError, PipelineError
from .report import ALL_STAGES, RunConfig, run_pipeline

__all__ = ["main", "parse_config_file"]

_SUBCOMMAND_STAGES = {
    "freq": ("freq",),
    "cluster-top5": ("top5",),
    "cluster-trigram": ("trigram",),
    "similarity": ("similarity",),
    "lda": ("lda",),
    "fuse-cluster": ("fused",),
    "report-all": ALL_STAGES,
}

_BOOL_KEYS = {"hash_embeddings"}
_INT_KEYS = {"k_clusters", "k_topics", "hash_dim", "hash_seed", "seed", "lda_seed", "kmeans_seed", "autoencoder_seed", "epochs", "batch", "top_words"}
_FLOAT_KEYS = {"alpha"}
_PATH_KEYS = {"corpus", "out", "stopwords", "lemma_dict", "embedding_table"}
_STR_KEYS = {"reduction"}
_ALL_KEYS = _BOOL_KEYS | _INT_KEYS | _FLOAT_KEYS | _PATH_KEYS | _STR_KEYS


class UsageError(DivanError):
    """Bad flags, bad config keys, or missing required options."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); the contract is exit 1
        raise UsageError(message)


def parse_config_file(path: str | Path) -> dict[str, str]:
    """Read a flat ``key = value`` config file with ``#`` comments."""
    file_path = Path(path)
    if not file_path.is_file():
        raise UsageError(f"config file not found: {file_path}")
    values: dict[str, str] = {}
    for lineno, line in enumerate(file_path.read_text(encoding="utf-8").splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        key, sep, value = stripped.partition("=")
        if not sep:
            raise UsageError(f"{file_path}:{lineno}: expected 'key = value'")
        key = key.strip()
        if key not in _ALL_KEYS:
            raise UsageError(f"{file_path}:{lineno}: unknown config key {key!r}")
        values[key] = value.strip()
    return values


def _parse_bool(raw: str, key: str) -> bool:
    lowered = raw.lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise UsageError(f"config key {key!r} expects a boolean, got {raw!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="divan", description="Unsupervised analysis reports for poetry corpora.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("freq", "word-frequency histograms and word clouds"),
        ("cluster-top5", "k-means over top-5 bag-of-words vectors"),
        ("cluster-trigram", "k-means over verse-scoped trigram histograms"),
        ("similarity", "trigram cosine-similarity heatmaps"),
        ("lda", "topic model per book (theta and top words)"),
        ("fuse-cluster", "topic+embedding fusion, autoencoder, k-means"),
        ("report-all", "every report in one bundle"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", type=Path, help="key = value config file")
        p.add_argument("--corpus", type=Path, help="corpus root directory")
        p.add_argument("--out", type=Path, help="output directory")
        p.add_argument("--stopwords", type=Path, help="stop-word file (default: built-in list)")
        p.add_argument("--lemma-dict", type=Path, help="surface<TAB>lemma dictionary")
        p.add_argument("--reduction", choices=("stem", "lemmatize", "none"), help="token reduction mode")
        p.add_argument("--k-clusters", type=int, help="number of k-means clusters (default 4)")
        p.add_argument("--k-topics", type=int, help="number of topics (default 4)")
        p.add_argument("--alpha", type=float, help="topic-vector scale before fusion (default 15)")
        p.add_argument("--embedding-table", type=Path, help="embedding TSV for the fused mode")
        p.add_argument("--hash-embeddings", action="store_true", default=None, help="use the deterministic hash provider")
        p.add_argument("--hash-dim", type=int, help="hash-provider dimension (default 768)")
        p.add_argument("--hash-seed", type=int, help="hash-provider seed (default 42)")
        p.add_argument("--seed", type=int, help="set every seed at once")
        p.add_argument("--lda-seed", type=int, help="topic-model seed (default 42)")
        p.add_argument("--kmeans-seed", type=int, help="k-means seed (default 42)")
        p.add_argument("--autoencoder-seed", type=int, help="autoencoder seed (default 42)")
        p.add_argument("--epochs", type=int, help="autoencoder epochs (default 1000)")
        p.add_argument("--batch", type=int, help="autoencoder batch size (default 128)")
        p.add_argument("--top-words", type=int, help="terms per histogram / topic listing (default 15)")
    return parser


def _resolve(args: argparse.Namespace) -> RunConfig:
    values: dict[str, object] = {}
    if args.config:
        for key, raw in parse_config_file(args.config).items():
            if key in _BOOL_KEYS:
                values[key] = _parse_bool(raw, key)
            elif key in _INT_KEYS:
                try:
                    values[key] = int(raw)
                except ValueError:
                    raise UsageError(f"config key {key!r} expects an integer, got {raw!r}")
            elif key in _FLOAT_KEYS:
                try:
                    values[key] = float(raw)
                except ValueError:
                    raise UsageError(f"config key {key!r} expects a number, got {raw!r}")
            elif key in _PATH_KEYS:
                values[key] = Path(raw)
            else:
                values[key] = raw

    for key in _ALL_KEYS:
        if getattr(args, key, None) is not None:
            values[key] = getattr(args, key)

    corpus = values.get("corpus")
    out = values.get("out")
    if corpus is None:
        raise UsageError("a corpus directory is required (--corpus or config 'corpus')")
    if out is None:
        raise UsageError("an output directory is required (--out or config 'out')")

    seed = values.get("seed")
    def pick_seed(key: str) -> int:
        if values.get(key) is not None:
            return int(values[key])
        if seed is not None:
            return int(seed)
        return 42

    stages = _SUBCOMMAND_STAGES[args.command]
    if "fused" in stages:
        feature_mode = "fused"
    elif "trigram" in stages:
        feature_mode = "trigram"
    else:
        feature_mode = "top5"
    try:
        return RunConfig(
            corpus_path=Path(corpus),
            out_dir=Path(out),
            stages=stages,
            stopword_path=values.get("stopwords"),
            lemma_dict_path=values.get("lemma_dict"),
            reduction_mode=values.get("reduction", "stem"),
            feature_mode=feature_mode,
            k_clusters=int(values.get("k_clusters", 4)),
            k_topics=int(values.get("k_topics", 4)),
            alpha=float(values.get("alpha", 15.0)),
            embedding_table_path=values.get("embedding_table"),
            hash_embeddings=bool(values.get("hash_embeddings", False)),
            hash_dim=int(values.get("hash_dim", 768)),
            hash_seed=pick_seed("hash_seed"),
            lda_seed=pick_seed("lda_seed"),
            kmeans_seed=pick_seed("kmeans_seed"),
            autoencoder_seed=pick_seed("autoencoder_seed"),
            epochs=int(values.get("epochs", 1000)),
            batch_size=int(values.get("batch", 128)),
            top_words=int(values.get("top_words", 15)),
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        config = _resolve(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    try:
        bundle = run_pipeline(config)
    except PipelineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        if isinstance(exc.cause, DivergenceError):
            return 3
        return 2

    print(f"wrote {len(bundle.artifacts)} artifacts to {bundle.out_dir}")
    print(f"manifest: {bundle.meta_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
