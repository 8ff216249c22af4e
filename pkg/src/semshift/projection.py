"""2-D unsupervised views of embedding sets.

PCA is fit on a background sample (covariance eigendecomposition, float64) and
then applied to query sentences. t-SNE is the exact O(n^2) formulation: per
point, a Gaussian bandwidth is found by binary search so the conditional
distribution hits the requested perplexity; symmetrized affinities are then
laid out by gradient descent on KL(P || Q) with early exaggeration and a
momentum schedule. Runs are deterministic given the seed, with each point's
initial position keyed by its sentence id.
"""

from __future__ import annotations

import csv
import hashlib
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import backend
from .embeddings import EmbeddingMatrix


class ProjectionError(ValueError):
    pass


@dataclass(frozen=True)
class PcaModel:
    mean: np.ndarray  # (dim,)
    components: np.ndarray  # (2, dim), orthonormal rows
    explained_variance: np.ndarray  # (2,), non-increasing


def _as_float_rows(data) -> np.ndarray:
    if isinstance(data, EmbeddingMatrix):
        data = data.vectors
    rows = np.asarray(data, dtype=np.float64)
    if rows.ndim != 2:
        raise ProjectionError("expected a 2-D array of row vectors")
    return rows


def pca_fit(background) -> PcaModel:
    """Top-2 principal directions of the mean-centered background.

    Sign convention: each component's largest-magnitude entry is positive.
    """
    rows = _as_float_rows(background)
    n = rows.shape[0]
    if n <= 2:
        raise ProjectionError(f"PCA background needs more than 2 rows, got {n}")
    mean = rows.mean(axis=0)
    centered = rows - mean
    cov = centered.T @ centered / (n - 1)
    eigenvalues, eigenvectors = np.linalg.eigh(cov)
    top = eigenvalues[::-1][:2]
    if top[1] <= max(top[0], 1.0) * 1e-12:
        raise ProjectionError("background has rank < 2; cannot fit a 2-D rotation")
    components = eigenvectors[:, ::-1][:, :2].T.copy()
    for row in components:
        if row[np.argmax(np.abs(row))] < 0:
            row *= -1.0
    return PcaModel(mean=mean, components=components, explained_variance=top.copy())


def pca_transform(model: PcaModel, data) -> np.ndarray:
    """Project rows onto the fitted plane: (X - mean) @ components.T."""
    rows = _as_float_rows(data)
    if rows.shape[1] != model.mean.shape[0]:
        raise ProjectionError(
            f"dimension mismatch: model dim {model.mean.shape[0]}, data dim {rows.shape[1]}"
        )
    return (rows - model.mean) @ model.components.T


@dataclass
class TsneConfig:
    perplexity: float = 15.0
    iterations: int = 1000
    early_exaggeration: float = 12.0
    exaggeration_until: int = 250
    learning_rate: float = 200.0
    momentum_early: float = 0.5
    momentum_late: float = 0.8
    momentum_switch: int = 250
    seed: int = 0

    def __post_init__(self):
        if self.perplexity <= 1.0:
            raise ProjectionError(f"perplexity must exceed 1, got {self.perplexity}")
        if self.iterations < 1:
            raise ProjectionError("iterations must be positive")
        if self.learning_rate <= 0:
            raise ProjectionError("learning rate must be positive")


@dataclass
class TsneRun:
    coords: np.ndarray  # (n, 2)
    kl_per_iteration: list = field(default_factory=list)
    achieved_perplexity: np.ndarray | None = None


def _squared_distances(rows: np.ndarray) -> np.ndarray:
    sq = np.einsum("ij,ij->i", rows, rows)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (rows @ rows.T)
    np.maximum(d2, 0.0, out=d2)
    np.fill_diagonal(d2, 0.0)
    return d2


def _row_entropy(d2_row: np.ndarray, beta: float):
    """Shannon entropy (nats) and probabilities of p_{j|i} at precision beta."""
    # exp is shift-invariant in the distribution; subtracting the min keeps it stable.
    shifted = -beta * (d2_row - d2_row.min())
    p = np.exp(shifted)
    total = p.sum()
    p /= total
    entropy = beta * float((p * (d2_row - d2_row.min())).sum()) + math.log(total)
    return entropy, p


def conditional_affinities(d2: np.ndarray, perplexity: float, max_iter: int = 128):
    """Per-point conditional affinities calibrated to the target perplexity.

    Returns (P_conditional, achieved_perplexity). Rows whose distances are all
    equal cannot reach the target; they fall back to uniform affinities with a
    warning.
    """
    n = d2.shape[0]
    target = math.log(perplexity)
    p_cond = np.zeros((n, n), dtype=np.float64)
    achieved = np.empty(n, dtype=np.float64)
    degenerate = 0
    idx = np.arange(n)
    for i in range(n):
        row = d2[i, idx != i]
        if row.max() - row.min() <= 1e-30:
            p_cond[i, idx != i] = 1.0 / (n - 1)
            achieved[i] = float(n - 1)
            degenerate += 1
            continue
        beta = 1.0
        lo, hi = 0.0, math.inf
        entropy, p = _row_entropy(row, beta)
        for _ in range(max_iter):
            if abs(entropy - target) < 1e-10:
                break
            if entropy > target:  # too flat: increase precision
                lo = beta
                beta = beta * 2.0 if math.isinf(hi) else 0.5 * (lo + hi)
            else:
                hi = beta
                beta = beta / 2.0 if lo == 0.0 else 0.5 * (lo + hi)
            entropy, p = _row_entropy(row, beta)
        p_cond[i, idx != i] = p
        achieved[i] = math.exp(entropy)
    if degenerate:
        warnings.warn(
            f"{degenerate} point(s) had all-equal distances; using uniform affinities",
            RuntimeWarning,
            stacklevel=2,
        )
    return p_cond, achieved


def _seeded_init(ids, seed: int) -> np.ndarray:
    """Initial layout ~ N(0, 1e-4), keyed per point by (seed, sentence id)."""
    coords = np.empty((len(ids), 2), dtype=np.float64)
    for i, id_ in enumerate(ids):
        digest = hashlib.blake2b(f"{seed}:{id_}".encode("utf-8"), digest_size=8).digest()
        rng = np.random.Generator(np.random.PCG64(int.from_bytes(digest, "little")))
        coords[i] = 1e-4 * rng.standard_normal(2)
    return coords


def tsne(matrix: EmbeddingMatrix, cfg: TsneConfig, full_output: bool = False):
    """Exact t-SNE of the matrix rows into 2-D.

    Returns the (n, 2) coordinates, or a :class:`TsneRun` with per-iteration
    KL divergence and per-point achieved perplexity when ``full_output`` is set.
    """
    rows = np.ascontiguousarray(matrix.vectors, dtype=np.float64)
    n = rows.shape[0]
    if n < 4:
        raise ProjectionError(f"t-SNE needs at least 4 points, got {n}")
    if cfg.perplexity >= (n - 1) / 3.0:
        raise ProjectionError(
            f"perplexity {cfg.perplexity} infeasible for {n} points (needs < (n-1)/3)"
        )
    d2 = _squared_distances(rows)
    p_cond, achieved = conditional_affinities(d2, cfg.perplexity)
    p = (p_cond + p_cond.T) / (2.0 * n)

    coords = _seeded_init(matrix.ids, cfg.seed)
    velocity = np.zeros_like(coords)
    kl_path: list[float] = []
    p_exaggerated = p * cfg.early_exaggeration
    for iteration in range(cfg.iterations):
        p_opt = p_exaggerated if iteration < cfg.exaggeration_until else p
        momentum = cfg.momentum_early if iteration < cfg.momentum_switch else cfg.momentum_late
        grad, kl = backend.tsne_step(coords, p_opt, p)
        velocity = momentum * velocity - cfg.learning_rate * grad
        coords = coords + velocity
        coords = coords - coords.mean(axis=0)
        kl_path.append(kl)
    if full_output:
        return TsneRun(coords=coords, kl_per_iteration=kl_path, achieved_perplexity=achieved)
    return coords


PROJECTION_CSV_HEADER = ["sentence_id", "x", "y", "note_type", "specialty"]


def write_projection_csv(ids, coords, metadata, path) -> None:
    """Emit projected points with note metadata for replotting.

    ``metadata`` maps sentence id to (note_type, specialty); missing ids get
    empty fields.
    """
    coords = np.asarray(coords, dtype=np.float64)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(PROJECTION_CSV_HEADER)
        for id_, (x, y) in zip(ids, coords):
            note_type, specialty = metadata.get(id_, ("", ""))
            writer.writerow([id_, repr(float(x)), repr(float(y)), note_type, specialty])
