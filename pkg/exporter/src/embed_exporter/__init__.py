"""embed-exporter: transformer sentence embeddings as files or over HTTP.

Reads sentence-record JSON lines, computes mean-pooled sentence embeddings
with a pretrained encoder, and either writes the binary embedding file or
serves the POST /embed protocol. Both surfaces are byte-compatible with the
semshift toolkit's external interfaces without sharing any code with it.
"""

from .embfile import write_embedding_file
from .encoder import DEFAULT_MODEL, SentenceEncoder
from .export import ExporterConfig, ExportSummary, export, read_sentence_records
from .server import build_app, serve

__all__ = [
    "DEFAULT_MODEL",
    "SentenceEncoder",
    "ExporterConfig",
    "ExportSummary",
    "export",
    "read_sentence_records",
    "build_app",
    "serve",
    "write_embedding_file",
]

__version__ = "0.1.0"
