"""Pure-numpy implementations of the hot kernels.

Mirrors the compiled module ``semshift._kernels``; see ``semshift.backend``
for how one of the two is selected at import time.
"""

from __future__ import annotations

import numpy as np


def cosine_block(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Cosine distances between all row pairs of two row-normalized matrices.

    ``out[i, j] = 1 - u[i] . v[j]``, clamped to [0, 2] against float drift.
    """
    out = 1.0 - u @ v.T
    np.clip(out, 0.0, 2.0, out=out)
    return out


def tsne_step(y: np.ndarray, p_opt: np.ndarray, p_report: np.ndarray):
    """One exact t-SNE evaluation: gradient of KL(p_opt || Q) and KL(p_report || Q).

    ``y`` is the current n x 2 embedding; ``p_opt`` the (possibly exaggerated)
    affinities being optimized; ``p_report`` the true affinities used for the
    reported KL. Returns ``(grad, kl)``.
    """
    sq = np.einsum("ij,ij->i", y, y)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (y @ y.T)
    np.maximum(d2, 0.0, out=d2)
    num = 1.0 / (1.0 + d2)
    np.fill_diagonal(num, 0.0)
    z = num.sum()
    q = num / z
    pq = (p_opt - q) * num
    grad = 4.0 * (pq.sum(axis=1)[:, None] * y - pq @ y)
    mask = p_report > 0.0
    kl = float(np.sum(p_report[mask] * np.log(p_report[mask] / q[mask])))
    return grad, kl
