"""Sentence-vector storage and primitives.

Vectors are held at float32 (matching common embedding dumps); all distance
arithmetic upcasts to float64. The binary file format is fixed and bit-exact:

    magic "EMB1" | u32 LE version=1 | u32 LE row count | u32 LE dim
    then per row: u32 LE id byte length | id bytes (UTF-8) | dim x float32 LE

The module also provides a deterministic hash-based test embedder (so the full
pipeline runs without any transformer) and a client for the external
``POST /embed`` service protocol.
"""

from __future__ import annotations

import codecs
import hashlib
import struct
import time

import numpy as np
import requests

from .ingest import sentence_id, tokenize

FORMAT_MAGIC = b"EMB1"
FORMAT_VERSION = 1
DEFAULT_DIM = 768


class EmbeddingError(ValueError):
    """Invalid matrix, vector, or embedding file; ``code`` names the failure."""

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


class ServiceError(RuntimeError):
    """Embedding-service failure; ``code`` is one of transport / status /
    bad_payload / row_count / dim_mismatch / non_finite."""

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


class EmbeddingMatrix:
    """Immutable ids-to-rows mapping. Rows are float32, reads are thread-safe."""

    __slots__ = ("ids", "vectors", "_index")

    def __init__(self, ids, vectors):
        vectors = np.ascontiguousarray(vectors, dtype=np.float32)
        if vectors.ndim != 2:
            raise EmbeddingError("bad_shape", f"vectors must be 2-D, got {vectors.ndim}-D")
        ids = [str(i) for i in ids]
        if len(ids) != vectors.shape[0]:
            raise EmbeddingError(
                "row_mismatch", f"{len(ids)} ids for {vectors.shape[0]} vector rows"
            )
        index: dict[str, int] = {}
        for pos, id_ in enumerate(ids):
            if id_ in index:
                raise EmbeddingError("duplicate_id", f"duplicate id {id_!r}")
            index[id_] = pos
        if vectors.size and not np.all(np.isfinite(vectors)):
            raise EmbeddingError("non_finite", "vectors contain NaN or infinity")
        vectors.setflags(write=False)
        self.ids = ids
        self.vectors = vectors
        self._index = index

    @property
    def dim(self) -> int:
        return int(self.vectors.shape[1])

    def __len__(self) -> int:
        return len(self.ids)

    def __contains__(self, id_) -> bool:
        return id_ in self._index

    def row(self, id_) -> np.ndarray:
        try:
            return self.vectors[self._index[id_]]
        except KeyError:
            raise KeyError(f"unknown sentence id {id_!r}") from None

    def subset(self, ids) -> "EmbeddingMatrix":
        """New matrix with the requested ids, in the requested order."""
        rows = [self._index[i] if i in self._index else self._missing(i) for i in ids]
        return EmbeddingMatrix(list(ids), self.vectors[rows])

    def _missing(self, id_):
        raise KeyError(f"unknown sentence id {id_!r}")

    def __eq__(self, other) -> bool:
        if not isinstance(other, EmbeddingMatrix):
            return NotImplemented
        return self.ids == other.ids and np.array_equal(self.vectors, other.vectors)


def mean_pool(token_vectors) -> np.ndarray:
    """Component-wise arithmetic mean of the given vectors, at float64."""
    vectors = list(token_vectors)
    if not vectors:
        raise EmbeddingError("empty_pool", "cannot pool zero tokens")
    try:
        arr = np.asarray(vectors, dtype=np.float64)
    except ValueError as exc:
        raise EmbeddingError("dim_mismatch", f"token vectors disagree on dimension: {exc}") from exc
    if arr.ndim != 2:
        raise EmbeddingError("dim_mismatch", "token vectors disagree on dimension")
    return arr.mean(axis=0)


def pool_documents(matrix: EmbeddingMatrix, doc_of: dict) -> EmbeddingMatrix:
    """Document vectors as the mean of their sentence vectors.

    ``doc_of`` maps sentence id to document id; documents appear in order of
    first sentence occurrence.
    """
    groups: dict[str, list[str]] = {}
    for sid in matrix.ids:
        if sid in doc_of:
            groups.setdefault(doc_of[sid], []).append(sid)
    ids = list(groups)
    rows = [mean_pool([matrix.row(sid) for sid in groups[d]]) for d in ids]
    return EmbeddingMatrix(ids, np.asarray(rows, dtype=np.float32))


def cosine_distance(u, v) -> float:
    """1 - cos(u, v), clamped to [0, 2]. Inputs must have nonzero norm."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise EmbeddingError("dim_mismatch", f"shapes {u.shape} and {v.shape} differ")
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        raise EmbeddingError("zero_norm", "cosine distance undefined for zero-norm vector")
    if np.array_equal(u, v):
        return 0.0
    d = 1.0 - float(np.dot(u, v)) / (nu * nv)
    return min(2.0, max(0.0, d))


def _token_seed(token: str, seed: int) -> int:
    digest = hashlib.blake2b(f"{seed}:{token}".encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def test_embed(sentence: str, seed: int, dim: int) -> np.ndarray:
    """Deterministic stand-in embedding: mean of per-token pseudorandom unit vectors.

    Identical sentences map to identical vectors; sentences sharing more tokens
    are closer in expectation. A sentence with no word tokens hashes its raw
    text as a single pseudo-token.
    """
    if dim < 2:
        raise EmbeddingError("bad_dim", f"test embedder needs dim >= 2, got {dim}")
    tokens = tokenize(sentence) or [sentence]
    out = np.zeros(dim, dtype=np.float64)
    for token in tokens:
        rng = np.random.Generator(np.random.PCG64(_token_seed(token, seed)))
        v = rng.standard_normal(dim)
        out += v / np.linalg.norm(v)
    return out / len(tokens)


class TestEmbedder:
    """Callable wrapper around :func:`test_embed` with a fixed (seed, dim)."""

    def __init__(self, seed: int, dim: int):
        if dim < 2:
            raise EmbeddingError("bad_dim", f"test embedder needs dim >= 2, got {dim}")
        self.seed = int(seed)
        self.dim = int(dim)

    def embed(self, sentence: str) -> np.ndarray:
        return test_embed(sentence, self.seed, self.dim)

    def matrix_for(self, texts, ids=None) -> EmbeddingMatrix:
        """Embed unique texts into a matrix keyed by content hash (or given ids)."""
        texts = list(texts)
        if ids is None:
            ids = [sentence_id(t) for t in texts]
        rows = np.asarray([self.embed(t) for t in texts], dtype=np.float32)
        if not texts:
            rows = np.zeros((0, self.dim), dtype=np.float32)
        return EmbeddingMatrix(ids, rows)


def save_embeddings(matrix: EmbeddingMatrix, path) -> None:
    with open(path, "wb") as fh:
        fh.write(FORMAT_MAGIC)
        fh.write(struct.pack("<III", FORMAT_VERSION, len(matrix), matrix.dim))
        for id_, row in zip(matrix.ids, matrix.vectors):
            raw = id_.encode("utf-8")
            fh.write(struct.pack("<I", len(raw)))
            fh.write(raw)
            fh.write(row.astype("<f4", copy=False).tobytes())


def _take(fh, count: int, what: str) -> bytes:
    data = fh.read(count)
    if len(data) != count:
        raise EmbeddingError("truncated", f"file truncated while reading {what}")
    return data


def load_embeddings(path) -> EmbeddingMatrix:
    """Load an embedding file; the roundtrip with :func:`save_embeddings` is bit-exact."""
    with open(path, "rb") as fh:
        magic = _take(fh, 4, "magic")
        if magic != FORMAT_MAGIC:
            raise EmbeddingError("bad_magic", f"not an embedding file (magic {magic!r})")
        version, count, dim = struct.unpack("<III", _take(fh, 12, "header"))
        if version != FORMAT_VERSION:
            raise EmbeddingError("bad_version", f"unsupported version {version}")
        if dim == 0 and count > 0:
            raise EmbeddingError("invalid_dimension", "invalid dimension 0")
        ids: list[str] = []
        vectors = np.empty((count, dim), dtype=np.float32)
        for row in range(count):
            (id_len,) = struct.unpack("<I", _take(fh, 4, f"id length of row {row}"))
            raw = _take(fh, id_len, f"id of row {row}")
            try:
                ids.append(codecs.decode(raw, "utf-8"))
            except UnicodeDecodeError as exc:
                raise EmbeddingError("bad_id", f"row {row} id is not UTF-8") from exc
            payload = _take(fh, 4 * dim, f"vector of row {row}")
            vectors[row] = np.frombuffer(payload, dtype="<f4")
        if fh.read(1):
            raise EmbeddingError("trailing_data", "unexpected bytes after final row")
    return EmbeddingMatrix(ids, vectors)


def fetch_embeddings(
    texts,
    endpoint: str,
    *,
    ids=None,
    timeout: float = 30.0,
    retries: int = 2,
    backoff: float = 0.25,
    session=None,
) -> EmbeddingMatrix:
    """Fetch vectors for ``texts`` from an embedding service.

    Speaks the fixed protocol: ``POST {endpoint}/embed`` with body
    ``{"texts": [...]}``, expecting ``{"dim": int, "vectors": [[...], ...]}``.
    Transport failures and non-success statuses are retried up to ``retries``
    times with exponential backoff. An empty input returns an empty matrix
    without contacting the server.
    """
    texts = list(texts)
    if ids is None:
        ids = [sentence_id(t) for t in texts]
    if not texts:
        return EmbeddingMatrix([], np.zeros((0, 0), dtype=np.float32))
    url = endpoint.rstrip("/") + "/embed"
    http = session or requests
    response = None
    last_exc: Exception | None = None
    for attempt in range(retries + 1):
        if attempt:
            time.sleep(backoff * (2 ** (attempt - 1)))
        try:
            response = http.post(url, json={"texts": texts}, timeout=timeout)
        except requests.RequestException as exc:
            last_exc = exc
            response = None
            continue
        if response.status_code == 200:
            break
        last_exc = ServiceError("status", f"{url} returned status {response.status_code}")
    else:
        if response is None:
            raise ServiceError("transport", f"could not reach {url}: {last_exc}") from last_exc
        raise last_exc  # final non-200 status
    try:
        payload = response.json()
        dim = int(payload["dim"])
        rows = payload["vectors"]
    except (ValueError, KeyError, TypeError) as exc:
        raise ServiceError("bad_payload", f"malformed response from {url}: {exc}") from exc
    if len(rows) != len(texts):
        raise ServiceError(
            "row_count", f"row-count mismatch: sent {len(texts)} texts, got {len(rows)} vectors"
        )
    matrix = np.asarray(rows, dtype=np.float64)
    if matrix.ndim != 2 or matrix.shape[1] != dim:
        raise ServiceError("dim_mismatch", f"vectors do not match server-reported dim {dim}")
    if not np.all(np.isfinite(matrix)):
        raise ServiceError("non_finite", "service returned NaN or infinite values")
    return EmbeddingMatrix(ids, matrix.astype(np.float32))
