"""Pairwise cosine distances and the median cosine distance (MCD).

The MCD between two sets is the exact median over all cross pairs; within one
set it is the exact median over unordered distinct pairs (self-pairs excluded).
Distances are computed in float64 from row-normalized vectors; the pair stream
is tiled for memory, but the median is always exact.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from . import backend
from .cohorts import Relation
from .embeddings import EmbeddingMatrix

DEFAULT_TILE = 512


class DistanceError(ValueError):
    pass


@dataclass(frozen=True)
class DistanceSummary:
    """One train/test (or within-set) distance measurement."""

    train_name: str
    test_name: str
    pair_count: int
    mcd: float
    relation: Relation


def _normalized_rows(matrix: EmbeddingMatrix) -> np.ndarray:
    if len(matrix) == 0:
        raise DistanceError("cannot compute distances over an empty matrix")
    rows = np.ascontiguousarray(matrix.vectors, dtype=np.float64)
    norms = np.linalg.norm(rows, axis=1)
    bad = np.flatnonzero(norms == 0.0)
    if bad.size:
        raise DistanceError(f"zero-norm embedding for id {matrix.ids[int(bad[0])]!r}")
    return rows / norms[:, None]


def pairwise_cosine(a: EmbeddingMatrix, b: EmbeddingMatrix, tile: int = DEFAULT_TILE):
    """Yield cosine distances between all |a| x |b| row pairs, one tile at a time.

    Tiles are row blocks of ``a``; consumers must not rely on ordering beyond
    (row-block, column) order.
    """
    if a.dim != b.dim:
        raise DistanceError(f"dimension mismatch: {a.dim} vs {b.dim}")
    u = _normalized_rows(a)
    v = _normalized_rows(b)
    for start in range(0, u.shape[0], tile):
        yield backend.cosine_block(u[start : start + tile], v).ravel()


def mcd(a: EmbeddingMatrix, b: EmbeddingMatrix, tile: int = DEFAULT_TILE) -> float:
    """Exact median cosine distance over all cross pairs of ``a`` and ``b``."""
    total = len(a) * len(b)
    distances = np.empty(total, dtype=np.float64)
    pos = 0
    for block in pairwise_cosine(a, b, tile=tile):
        distances[pos : pos + block.size] = block
        pos += block.size
    return float(np.median(distances))


def intra_mcd(a: EmbeddingMatrix, tile: int = DEFAULT_TILE) -> float:
    """Exact median cosine distance over unordered distinct pairs within ``a``."""
    n = len(a)
    if n < 2:
        raise DistanceError(f"intra-set MCD needs at least 2 rows, got {n}")
    u = _normalized_rows(a)
    total = n * (n - 1) // 2
    distances = np.empty(total, dtype=np.float64)
    pos = 0
    for start in range(0, n, tile):
        stop = min(start + tile, n)
        block = backend.cosine_block(u[start:stop], u[start:])
        # Keep strictly-upper-triangle entries of the full matrix: for global
        # row i = start + r, columns start + c with c > r.
        rows, cols = np.triu_indices(stop - start, k=1, m=block.shape[1])
        distances[pos : pos + rows.size] = block[rows, cols]
        pos += rows.size
    assert pos == total
    return float(np.median(distances))


def pair_count(a_size: int, b_size: int | None = None) -> int:
    """|A| x |B| cross pairs, or |A|(|A|-1)/2 within-set pairs when b is None."""
    if b_size is None:
        return a_size * (a_size - 1) // 2
    return a_size * b_size


CSV_HEADER = ["train_name", "test_name", "relation", "pair_count", "mcd"]


def write_distance_csv(summaries, path) -> None:
    """Emit DistanceSummary rows; mcd printed with 6 decimals."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for s in summaries:
            writer.writerow(
                [s.train_name, s.test_name, s.relation.value, s.pair_count, f"{s.mcd:.6f}"]
            )
