"""Experiment configuration: a small INI-style file with nested sections.

Example::

    [run]
    seed = 42
    out = runs/demo

    [corpus]
    notes = data/notes.jsonl

    [lexicon]
    oncology = data/lexicon_oncology.txt
    cardiology = data/lexicon_cardiology.txt

    [labels]
    path = data/labels.csv

    [embedding]
    kind = test        ; test | file | service
    dim = 64
    seed = 7

    [train]
    learning_rate = 0.01
    epochs = 200
    batch_size = 32
    validation_fraction = 0.1
    l2_penalty = 0.0001
"""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, field

from .classifier import TrainConfig


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class EmbeddingSourceConfig:
    """Where sentence vectors come from: a test embedder, a file, or a service."""

    kind: str  # "test" | "file" | "service"
    dim: int = 0
    seed: int = 0
    path: str = ""
    endpoint: str = ""

    def __post_init__(self):
        if self.kind == "test":
            if self.dim < 2:
                raise ConfigError(f"test embedder needs dim >= 2, got {self.dim}")
        elif self.kind == "file":
            if not self.path:
                raise ConfigError("embedding kind 'file' requires a path")
        elif self.kind == "service":
            if not (self.endpoint.startswith("http://") or self.endpoint.startswith("https://")):
                raise ConfigError(f"embedding service endpoint must be an http(s) URL, got {self.endpoint!r}")
        else:
            raise ConfigError(f"unknown embedding kind {self.kind!r}")


@dataclass
class ExperimentConfig:
    corpus_paths: tuple = ()
    lexicon_paths: dict = field(default_factory=dict)  # specialty -> path
    labels_path: str = ""
    embedding: EmbeddingSourceConfig = field(
        default_factory=lambda: EmbeddingSourceConfig(kind="test", dim=64)
    )
    train: TrainConfig = field(default_factory=TrainConfig)
    train_fraction: float = 0.7
    seed: int = 0
    out_dir: str = "runs/out"

    def validate_paths(self) -> None:
        """Fail before any compute when a referenced input is missing."""
        missing = [p for p in self.corpus_paths if not os.path.exists(p)]
        missing += [p for p in self.lexicon_paths.values() if not os.path.exists(p)]
        if self.labels_path and not os.path.exists(self.labels_path):
            missing.append(self.labels_path)
        if self.embedding.kind == "file" and not os.path.exists(self.embedding.path):
            missing.append(self.embedding.path)
        if missing:
            raise ConfigError("missing input path(s): " + ", ".join(sorted(missing)))
        if not self.corpus_paths:
            raise ConfigError("no corpus paths configured")
        if not self.lexicon_paths:
            raise ConfigError("no lexicon paths configured")


def _relative_to(base_dir: str, path: str) -> str:
    if not path or os.path.isabs(path):
        return path
    return os.path.normpath(os.path.join(base_dir, path))


def load_config(path, seed_override=None, out_override=None) -> ExperimentConfig:
    """Parse a config file; relative paths resolve against the file's directory."""
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    read = parser.read(path)
    if not read:
        raise ConfigError(f"cannot read config file {path!r}")
    base = os.path.dirname(os.path.abspath(path))

    run = parser["run"] if parser.has_section("run") else {}
    seed = int(run.get("seed", 0))
    out_dir = _relative_to(base, run.get("out", "runs/out"))
    train_fraction = float(run.get("train_fraction", 0.7))
    if seed_override is not None:
        seed = int(seed_override)
    if out_override is not None:
        out_dir = out_override

    corpus_paths = tuple(
        _relative_to(base, v) for _, v in sorted(parser.items("corpus"))
    ) if parser.has_section("corpus") else ()
    lexicon_paths = {
        spec: _relative_to(base, p) for spec, p in sorted(parser.items("lexicon"))
    } if parser.has_section("lexicon") else {}
    labels_path = (
        _relative_to(base, parser.get("labels", "path", fallback="")) if parser.has_section("labels") else ""
    )

    emb = parser["embedding"] if parser.has_section("embedding") else {}
    embedding = EmbeddingSourceConfig(
        kind=emb.get("kind", "test"),
        dim=int(emb.get("dim", 64)),
        seed=int(emb.get("seed", seed)),
        path=_relative_to(base, emb.get("path", "")),
        endpoint=emb.get("endpoint", ""),
    )

    tr = parser["train"] if parser.has_section("train") else {}
    train = TrainConfig(
        learning_rate=float(tr.get("learning_rate", 1e-2)),
        epochs=int(tr.get("epochs", 200)),
        batch_size=int(tr.get("batch_size", 32)),
        validation_fraction=float(tr.get("validation_fraction", 0.1)),
        seed=int(tr.get("seed", seed)),
        l2_penalty=float(tr.get("l2_penalty", 1e-4)),
    )

    return ExperimentConfig(
        corpus_paths=corpus_paths,
        lexicon_paths=lexicon_paths,
        labels_path=labels_path,
        embedding=embedding,
        train=train,
        train_fraction=train_fraction,
        seed=seed,
        out_dir=out_dir,
    )
