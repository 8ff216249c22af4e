"""Three-class softmax head over fixed sentence embeddings.

Training is full-precision mini-batch gradient descent with Adam moments on
mean categorical cross-entropy plus an L2 penalty on the weights. A seeded,
label-agnostic validation split is taken first; the reported head is the
snapshot from the epoch with the lowest validation loss (first occurrence on
ties). Everything is deterministic given the seed.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

CLASS_ORDER = ("Yes", "No", "Maybe")

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8
INIT_SCALE = 0.01


class TrainingError(RuntimeError):
    pass


def softmax(logits: np.ndarray) -> np.ndarray:
    """Row-wise stable softmax."""
    logits = np.asarray(logits, dtype=np.float64)
    shifted = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


@dataclass
class SoftmaxHead:
    weights: np.ndarray  # (3, dim)
    bias: np.ndarray  # (3,)
    class_order: tuple = CLASS_ORDER

    def __post_init__(self):
        # own copies, frozen: a head is immutable and safe to share across threads
        self.weights = np.array(self.weights, dtype=np.float64)
        self.bias = np.array(self.bias, dtype=np.float64)
        if self.weights.ndim != 2 or self.weights.shape[0] != len(self.class_order):
            raise TrainingError(f"weights must be ({len(self.class_order)}, dim)")
        if self.bias.shape != (len(self.class_order),):
            raise TrainingError("bias must have one entry per class")
        if not (np.all(np.isfinite(self.weights)) and np.all(np.isfinite(self.bias))):
            raise TrainingError("head parameters must be finite")
        self.weights.setflags(write=False)
        self.bias.setflags(write=False)

    @property
    def dim(self) -> int:
        return int(self.weights.shape[1])

    def logits(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(x, dtype=np.float64) @ self.weights.T + self.bias

    def predict_proba(self, x) -> np.ndarray:
        """Class probabilities for a single vector; positive, summing to one."""
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 1:
            raise TrainingError("predict_proba takes a single vector; use predict_proba_batch")
        if not np.all(np.isfinite(x)):
            raise TrainingError("input vector must be finite")
        return softmax(self.logits(x))

    def predict_proba_batch(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if not np.all(np.isfinite(X)):
            raise TrainingError("input must be finite")
        return softmax(self.logits(X))

    def predict_label(self, x) -> str:
        # np.argmax takes the first maximum, which matches class_order priority.
        return self.class_order[int(np.argmax(self.predict_proba(x)))]

    def copy(self) -> "SoftmaxHead":
        return SoftmaxHead(self.weights.copy(), self.bias.copy(), self.class_order)


def save_head(head: SoftmaxHead, path, selected_epoch: int = 0) -> None:
    obj = {
        "dim": head.dim,
        "class_order": list(head.class_order),
        "weights": [float(w) for w in head.weights.ravel()],
        "bias": [float(b) for b in head.bias],
        "selected_epoch": int(selected_epoch),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, sort_keys=True)
        fh.write("\n")


def load_head(path) -> tuple:
    """Returns (head, selected_epoch)."""
    with open(path, encoding="utf-8") as fh:
        obj = json.load(fh)
    dim = int(obj["dim"])
    order = tuple(obj["class_order"])
    weights = np.asarray(obj["weights"], dtype=np.float64).reshape(len(order), dim)
    head = SoftmaxHead(weights, np.asarray(obj["bias"], dtype=np.float64), order)
    return head, int(obj["selected_epoch"])


@dataclass
class TrainConfig:
    learning_rate: float = 1e-2
    epochs: int = 200
    batch_size: int = 32
    validation_fraction: float = 0.1
    seed: int = 0
    l2_penalty: float = 1e-4

    def __post_init__(self):
        if not 0.0 < self.validation_fraction < 0.5:
            raise TrainingError(
                f"validation_fraction must be in (0, 0.5), got {self.validation_fraction}"
            )
        if self.learning_rate <= 0:
            raise TrainingError("learning_rate must be positive")
        if self.l2_penalty < 0:
            raise TrainingError("l2_penalty must be non-negative")
        if self.batch_size < 1:
            raise TrainingError("batch_size must be at least 1")
        if self.epochs < 0:
            raise TrainingError("epochs must be non-negative")


@dataclass
class TrainReport:
    """Per-epoch losses plus the head snapshot at the selected epoch.

    ``selected_epoch`` counts completed epochs (1-based); 0 means the seeded
    initialization was kept (no epochs run).
    """

    train_losses: list = field(default_factory=list)
    val_losses: list = field(default_factory=list)
    selected_epoch: int = 0
    head: SoftmaxHead | None = None


def _cross_entropy(weights, bias, X, y) -> float:
    logits = X @ weights.T + bias
    shifted = logits - logits.max(axis=1, keepdims=True)
    log_z = np.log(np.exp(shifted).sum(axis=1))
    return float(np.mean(log_z - shifted[np.arange(len(y)), y]))


def _ce_gradient(weights, bias, X, y):
    """Gradient of mean cross-entropy w.r.t. weights and bias."""
    p = softmax(X @ weights.T + bias)
    p[np.arange(len(y)), y] -= 1.0
    p /= len(y)
    return p.T @ X, p.sum(axis=0)


def _encode_labels(labels, class_order) -> np.ndarray:
    index = {c: i for i, c in enumerate(class_order)}
    try:
        return np.asarray([index[l] for l in labels], dtype=np.intp)
    except KeyError as exc:
        raise TrainingError(f"unknown label {exc.args[0]!r}; expected one of {class_order}") from exc


def train_head(X, labels, cfg: TrainConfig, class_order=CLASS_ORDER) -> TrainReport:
    """Train a softmax head; deterministic given ``cfg.seed``.

    ``X`` is an (n, dim) array of embeddings (float32 input is upcast) and
    ``labels`` the aligned class names. Requires at least 20 examples and at
    least two distinct labels in the training split.
    """
    X = np.asarray(X, dtype=np.float64)
    y = _encode_labels(labels, class_order)
    n = X.shape[0]
    if n != len(y):
        raise TrainingError(f"{n} rows vs {len(y)} labels")
    if n < 20:
        raise TrainingError(f"need at least 20 examples, got {n}")

    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    order = rng.permutation(n)
    n_val = max(1, math.floor(n * cfg.validation_fraction))
    val_idx = order[:n_val]
    train_idx = order[n_val:]
    if len(np.unique(y[train_idx])) < 2:
        raise TrainingError("training split contains a single class")

    dim = X.shape[1]
    k = len(class_order)
    weights = rng.uniform(-INIT_SCALE, INIT_SCALE, size=(k, dim))
    bias = np.zeros(k, dtype=np.float64)

    report = TrainReport(head=SoftmaxHead(weights.copy(), bias.copy(), class_order))
    if cfg.epochs == 0:
        return report

    X_tr, y_tr = X[train_idx], y[train_idx]
    X_val, y_val = X[val_idx], y[val_idx]

    m_w = np.zeros_like(weights)
    v_w = np.zeros_like(weights)
    m_b = np.zeros_like(bias)
    v_b = np.zeros_like(bias)
    step = 0
    best_val = math.inf

    for epoch in range(1, cfg.epochs + 1):
        batch_order = rng.permutation(len(y_tr))
        for start in range(0, len(y_tr), cfg.batch_size):
            idx = batch_order[start : start + cfg.batch_size]
            g_w, g_b = _ce_gradient(weights, bias, X_tr[idx], y_tr[idx])
            g_w += cfg.l2_penalty * weights
            step += 1
            scale = (
                cfg.learning_rate
                * math.sqrt(1.0 - ADAM_BETA2**step)
                / (1.0 - ADAM_BETA1**step)
            )
            m_w = ADAM_BETA1 * m_w + (1.0 - ADAM_BETA1) * g_w
            v_w = ADAM_BETA2 * v_w + (1.0 - ADAM_BETA2) * g_w**2
            weights -= scale * m_w / (np.sqrt(v_w) + ADAM_EPS)
            m_b = ADAM_BETA1 * m_b + (1.0 - ADAM_BETA1) * g_b
            v_b = ADAM_BETA2 * v_b + (1.0 - ADAM_BETA2) * g_b**2
            bias -= scale * m_b / (np.sqrt(v_b) + ADAM_EPS)

        with np.errstate(over="ignore", invalid="ignore"):
            train_loss = _cross_entropy(weights, bias, X_tr, y_tr) + 0.5 * cfg.l2_penalty * float(
                np.sum(weights**2)
            )
            val_loss = _cross_entropy(weights, bias, X_val, y_val)
        if not (math.isfinite(train_loss) and math.isfinite(val_loss)):
            raise TrainingError("diverged: non-finite loss")
        report.train_losses.append(train_loss)
        report.val_losses.append(val_loss)
        if val_loss < best_val:
            best_val = val_loss
            report.selected_epoch = epoch
            report.head = SoftmaxHead(weights.copy(), bias.copy(), class_order)

    return report


def gradient_check(head: SoftmaxHead, X, labels, h: float = 1e-5) -> float:
    """Max relative error between analytic and central-difference CE gradients."""
    X = np.asarray(X, dtype=np.float64)
    if X.shape[0] == 0:
        raise TrainingError("gradient check needs a non-empty batch")
    y = _encode_labels(labels, head.class_order)
    g_w, g_b = _ce_gradient(head.weights, head.bias, X, y)

    worst = 0.0
    weights = head.weights.copy()
    bias = head.bias.copy()

    def loss() -> float:
        return _cross_entropy(weights, bias, X, y)

    for arr, grad in ((weights, g_w), (bias, g_b)):
        it = np.nditer(arr, flags=["multi_index"])
        while not it.finished:
            idx = it.multi_index
            orig = arr[idx]
            arr[idx] = orig + h
            up = loss()
            arr[idx] = orig - h
            down = loss()
            arr[idx] = orig
            numeric = (up - down) / (2.0 * h)
            analytic = grad[idx]
            err = abs(analytic - numeric) / max(abs(analytic), abs(numeric), 1e-8)
            worst = max(worst, err)
            it.iternext()
    return worst
