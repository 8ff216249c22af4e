"""Writer for the binary embedding-file format.

Layout (all integers little-endian):

    magic "EMB1" | u32 version = 1 | u32 row count | u32 dim
    then per row: u32 id byte length | id bytes (UTF-8) | dim x float32

This mirrors the consumer's documented format; the two packages share only
this byte contract, not code.
"""

from __future__ import annotations

import struct

import numpy as np

MAGIC = b"EMB1"
VERSION = 1


def write_embedding_file(ids, vectors, path) -> None:
    vectors = np.ascontiguousarray(vectors, dtype=np.float32)
    ids = list(ids)
    if vectors.ndim != 2 or len(ids) != vectors.shape[0]:
        raise ValueError(f"{len(ids)} ids for vectors of shape {vectors.shape}")
    if len(set(ids)) != len(ids):
        raise ValueError("ids must be unique")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<III", VERSION, vectors.shape[0], vectors.shape[1]))
        for id_, row in zip(ids, vectors):
            raw = id_.encode("utf-8")
            fh.write(struct.pack("<I", len(raw)))
            fh.write(raw)
            fh.write(row.astype("<f4", copy=False).tobytes())
