"""Batch export: sentence-record JSON lines in, binary embedding file out."""

from __future__ import annotations

import json
from dataclasses import dataclass

from .embfile import write_embedding_file
from .encoder import DEFAULT_MODEL, SentenceEncoder


class ExportError(ValueError):
    pass


@dataclass
class ExporterConfig:
    """Exactly one of output_path (export mode) / port (serve mode) is set."""

    model_name: str = DEFAULT_MODEL
    input_path: str = ""
    output_path: str = ""
    port: int = 0
    host: str = "127.0.0.1"
    batch_size: int = 32
    device: str = "cpu"

    def __post_init__(self):
        if bool(self.output_path) == bool(self.port):
            raise ExportError("set exactly one of output_path (export) or port (serve)")


@dataclass
class ExportSummary:
    rows: int
    dim: int
    truncated: int
    output_path: str


def read_sentence_records(path) -> list[tuple[str, str]]:
    """(sentence_id, text) pairs from sentence-record JSON lines.

    Records repeating an already-seen sentence_id are skipped (the id is a
    content hash, so such rows carry the same text).
    """
    pairs: list[tuple[str, str]] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                sid = obj["sentence_id"]
                text = obj["text"]
            except (json.JSONDecodeError, KeyError) as exc:
                raise ExportError(f"{path}:{lineno}: bad sentence record: {exc}") from exc
            if sid in seen:
                continue
            seen.add(sid)
            pairs.append((sid, text))
    return pairs


def export(cfg: ExporterConfig, encoder: SentenceEncoder | None = None) -> ExportSummary:
    if not cfg.output_path:
        raise ExportError("config is in serve mode; no output path")
    if not cfg.input_path:
        raise ExportError("export needs an input path")
    pairs = read_sentence_records(cfg.input_path)
    if encoder is None:
        encoder = SentenceEncoder(cfg.model_name, device=cfg.device, batch_size=cfg.batch_size)
    vectors, truncated = encoder.encode([text for _, text in pairs])
    write_embedding_file([sid for sid, _ in pairs], vectors, cfg.output_path)
    return ExportSummary(
        rows=len(pairs), dim=encoder.dim, truncated=truncated, output_path=cfg.output_path
    )
