"""Command line for the embedding exporter."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from divan.errors import DataError

from .export import ExportJob, export_embeddings


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="divan-export",
        description="Run a pretrained encoder over a poetry corpus and write the token-embedding TSV.",
    )
    parser.add_argument("corpus", type=Path, help="corpus root directory")
    parser.add_argument("model", help="model identifier or local model directory")
    parser.add_argument("output", type=Path, help="output TSV path")
    parser.add_argument("--layer", type=int, default=None,
                        help="encoder hidden layer to read (default: last)")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    job = ExportJob(corpus_path=args.corpus, model_id=args.model,
                    output_path=args.output, layer=args.layer)
    try:
        path = export_embeddings(job)
    except (DataError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
