"""divan-exporter: offline contextual-to-static embedding extraction."""

from .export import ExportJob, export_embeddings

__version__ = "0.1.0"
