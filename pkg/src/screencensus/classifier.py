"""Softmax-regression heads over embeddings, plus the zero-shot baseline.

Two multinomial logistic-regression heads are supported: perceived gender
(K=2) and perceived age over the nine canonical groups (K=9). Class
probabilities follow

    P(y = k | x) = exp(w_k . x + b_k) / sum_j exp(w_j . x + b_j)

computed with max-logit subtraction so large logits cannot overflow.
Training minimizes the L2-regularized multinomial cross-entropy with a
quasi-Newton method to a gradient-norm tolerance, which is sufficient for
this convex objective.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.optimize import minimize

from .errors import InputError, TrainingError

GENDER_CLASSES = ("Female", "Male")
AGE_CLASSES = (
    "0-2", "3-9", "10-19", "20-29", "30-39", "40-49", "50-59", "60-69", "70+",
)

TASK_CLASSES = {"gender": GENDER_CLASSES, "age": AGE_CLASSES}

HEAD_SCHEMA_VERSION = 1

# Candidate L2 strengths tried when the training config does not pin one.
L2_GRID = (1e-4, 1e-3, 1e-2)


@dataclass(frozen=True)
class ProbDist:
    """A probability distribution over an ordered set of class names."""

    probs: np.ndarray
    class_names: tuple[str, ...]

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=np.float64)
        object.__setattr__(self, "probs", probs)
        if probs.ndim != 1 or probs.shape[0] != len(self.class_names):
            raise InputError(
                f"probability vector length {probs.shape} does not match "
                f"{len(self.class_names)} class names"
            )
        if not np.all(np.isfinite(probs)):
            raise InputError("probabilities must be finite")
        if np.any(probs < -1e-12) or abs(float(probs.sum()) - 1.0) > 1e-9:
            raise InputError("probabilities must be non-negative and sum to 1")

    def argmax_index(self) -> int:
        # np.argmax returns the first maximum, which implements the
        # documented lowest-index tie-break.
        return int(np.argmax(self.probs))


@dataclass(frozen=True)
class SoftmaxHead:
    """Weights/biases of one multinomial logistic-regression classifier."""

    task: str
    class_names: tuple[str, ...]
    weights: np.ndarray  # (K, D)
    biases: np.ndarray  # (K,)
    checkpoint_id: str = ""
    l2_lambda: float = 0.0
    train_meta: dict = field(default_factory=dict)

    def __post_init__(self):
        weights = np.asarray(self.weights, dtype=np.float64)
        biases = np.asarray(self.biases, dtype=np.float64)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "biases", biases)
        object.__setattr__(self, "class_names", tuple(self.class_names))
        k = len(self.class_names)
        if weights.ndim != 2 or weights.shape[0] != k or biases.shape != (k,):
            raise InputError(
                f"head shapes {weights.shape}/{biases.shape} inconsistent with "
                f"{k} classes"
            )
        if self.task in TASK_CLASSES and self.class_names != TASK_CLASSES[self.task]:
            raise InputError(
                f"task {self.task!r} requires classes {TASK_CLASSES[self.task]}, "
                f"got {self.class_names}"
            )
        if not (np.all(np.isfinite(weights)) and np.all(np.isfinite(biases))):
            raise InputError("head parameters must be finite")

    @property
    def dim(self) -> int:
        return self.weights.shape[1]

    @property
    def n_classes(self) -> int:
        return self.weights.shape[0]


def _stable_softmax(logits: np.ndarray) -> np.ndarray:
    """Row-wise softmax with max-logit subtraction."""
    logits = np.asarray(logits, dtype=np.float64)
    shifted = logits - logits.max(axis=-1, keepdims=True)
    exps = np.exp(shifted)
    return exps / exps.sum(axis=-1, keepdims=True)


def _as_vector(x, dim: int | None = None) -> np.ndarray:
    vec = np.asarray(getattr(x, "vector", x), dtype=np.float64).reshape(-1)
    if dim is not None and vec.shape[0] != dim:
        raise InputError(f"embedding has dimension {vec.shape[0]}, expected {dim}")
    if not np.all(np.isfinite(vec)):
        raise InputError("embedding entries must be finite")
    return vec


def softmax_probs(head: SoftmaxHead, x) -> ProbDist:
    """Class probabilities of ``x`` under ``head``."""
    vec = _as_vector(x, head.dim)
    logits = head.weights @ vec + head.biases
    return ProbDist(_stable_softmax(logits), head.class_names)


def predict(head: SoftmaxHead, x) -> tuple[str, float]:
    """Argmax label and its probability; ties break to the lower class index."""
    dist = softmax_probs(head, x)
    idx = dist.argmax_index()
    return head.class_names[idx], float(dist.probs[idx])


def zero_shot_classify(x, class_prompts, embed_text, logit_scale: float = 100.0,
                       class_names=None) -> ProbDist:
    """Softmax over scaled cosine similarities to the prompt embeddings.

    Both the image embedding and each prompt embedding are unit-normalized
    before scoring. ``embed_text`` maps a prompt string to an embedding and
    is injected so callers can route through an encoder and/or a cache.
    """
    prompts = list(class_prompts)
    if len(prompts) < 2:
        raise InputError("zero-shot classification needs at least 2 prompts")
    if logit_scale <= 0:
        raise InputError("logit_scale must be positive")
    img = _unit(_as_vector(x))
    sims = np.array([float(img @ _unit(_as_vector(embed_text(p)))) for p in prompts])
    names = tuple(class_names) if class_names is not None else tuple(prompts)
    return ProbDist(_stable_softmax(logit_scale * sims), names)


def _unit(vec: np.ndarray) -> np.ndarray:
    norm = float(np.linalg.norm(vec))
    if norm == 0.0:
        raise InputError("cannot normalize a zero vector")
    return vec / norm


@dataclass(frozen=True)
class TrainConfig:
    """Hyperparameters for head training."""

    task: str = "gender"
    l2_lambda: float | None = None  # None -> select from L2_GRID on a held-out split
    gtol: float = 1e-6
    max_iter: int = 2000
    val_fraction: float = 0.1
    seed: int = 0
    checkpoint_id: str = ""


def _loss_and_grad(params, X, Y, lam):
    """Mean cross-entropy + (lam/2)*||W||^2 and its gradient.

    Biases are not regularized. ``Y`` is the one-hot label matrix.
    """
    n, d = X.shape
    k = Y.shape[1]
    W = params[: k * d].reshape(k, d)
    b = params[k * d:]
    logits = X @ W.T + b
    shifted = logits - logits.max(axis=1, keepdims=True)
    exps = np.exp(shifted)
    denom = exps.sum(axis=1, keepdims=True)
    log_probs = shifted - np.log(denom)
    loss = -float((Y * log_probs).sum()) / n + 0.5 * lam * float((W * W).sum())
    P = exps / denom
    diff = (P - Y) / n
    grad_W = diff.T @ X + lam * W
    grad_b = diff.sum(axis=0)
    return loss, np.concatenate([grad_W.ravel(), grad_b])


def _canonical_order(X: np.ndarray, label_idx: np.ndarray) -> np.ndarray:
    """Permutation sorting samples by a content digest.

    Training becomes invariant to the order the caller presents samples in:
    the optimizer always sees one canonical ordering, so floating-point
    reductions are reproduced bit-for-bit.
    """
    digests = [
        hashlib.sha256(X[i].tobytes() + bytes([label_idx[i]])).digest()
        for i in range(X.shape[0])
    ]
    return np.array(sorted(range(X.shape[0]), key=digests.__getitem__))


def _fit(X, Y, lam, gtol, max_iter):
    k, d = Y.shape[1], X.shape[1]
    x0 = np.zeros(k * d + k)
    result = minimize(
        _loss_and_grad, x0, args=(X, Y, lam), jac=True, method="L-BFGS-B",
        options={"gtol": gtol, "ftol": 1e-14, "maxiter": max_iter},
    )
    if not np.isfinite(result.fun):
        raise TrainingError(
            f"non-finite loss during training (lambda={lam}, iter={result.nit})"
        )
    W = result.x[: k * d].reshape(k, d)
    b = result.x[k * d:]
    grad_norm = float(np.max(np.abs(result.jac)))
    return W, b, float(result.fun), int(result.nit), grad_norm


def train_head(train, hyper: TrainConfig) -> SoftmaxHead:
    """Fit a softmax head on (embedding, label) pairs.

    ``train`` is a sequence of (embedding, label) pairs or an
    (X, labels) tuple with X of shape (N, D). When ``hyper.l2_lambda`` is
    None, the L2 strength is chosen from ``L2_GRID`` by accuracy on an
    internal held-out split and the model is refit on all data.
    """
    class_names = TASK_CLASSES.get(hyper.task)
    if class_names is None:
        raise InputError(f"unknown task {hyper.task!r}; expected gender or age")

    if isinstance(train, tuple) and len(train) == 2:
        X = np.asarray(train[0], dtype=np.float64)
        labels = list(train[1])
    else:
        pairs = list(train)
        if not pairs:
            raise TrainingError("empty training set")
        X = np.stack([_as_vector(x) for x, _ in pairs])
        labels = [lab for _, lab in pairs]
    if X.ndim != 2 or X.shape[0] != len(labels):
        raise InputError("training matrix and labels are misaligned")
    if not np.all(np.isfinite(X)):
        raise TrainingError("training embeddings contain non-finite values")

    name_to_idx = {name: i for i, name in enumerate(class_names)}
    try:
        label_idx = np.array([name_to_idx[lab] for lab in labels], dtype=np.int64)
    except KeyError as exc:
        raise InputError(f"label {exc.args[0]!r} outside the {hyper.task} taxonomy") from None
    if len(np.unique(label_idx)) < 2:
        raise TrainingError("training data contains fewer than 2 classes")

    order = _canonical_order(np.ascontiguousarray(X, dtype=np.float64), label_idx)
    X = X[order]
    label_idx = label_idx[order]

    k = len(class_names)
    Y = np.zeros((X.shape[0], k))
    Y[np.arange(X.shape[0]), label_idx] = 1.0

    if hyper.l2_lambda is not None:
        lam = float(hyper.l2_lambda)
        selection = {"mode": "fixed"}
    else:
        lam, selection = _select_lambda(X, Y, label_idx, hyper)

    W, b, loss, iters, grad_norm = _fit(X, Y, lam, hyper.gtol, hyper.max_iter)
    meta = {
        "l2_lambda": lam,
        "iterations": iters,
        "final_loss": loss,
        "grad_max_norm": grad_norm,
        "n_train": int(X.shape[0]),
        "lambda_selection": selection,
        "seed": hyper.seed,
    }
    return SoftmaxHead(
        task=hyper.task, class_names=class_names, weights=W, biases=b,
        checkpoint_id=hyper.checkpoint_id, l2_lambda=lam, train_meta=meta,
    )


def _select_lambda(X, Y, label_idx, hyper: TrainConfig):
    """Pick the L2 strength with best held-out accuracy (ties -> smaller)."""
    n = X.shape[0]
    n_val = max(1, int(round(n * hyper.val_fraction)))
    rng = np.random.default_rng(hyper.seed)
    # X is already in canonical (content-digest) order, so this split does
    # not depend on the caller's sample order.
    val_mask = np.zeros(n, dtype=bool)
    val_mask[rng.choice(n, size=n_val, replace=False)] = True
    if len(np.unique(label_idx[~val_mask])) < 2:
        # Degenerate split; fall back to the middle of the grid.
        return L2_GRID[1], {"mode": "fallback-degenerate-split"}

    scores = {}
    for lam in L2_GRID:
        W, b, _, _, _ = _fit(X[~val_mask], Y[~val_mask], lam, hyper.gtol, hyper.max_iter)
        pred = np.argmax(X[val_mask] @ W.T + b, axis=1)
        scores[lam] = float(np.mean(pred == label_idx[val_mask]))
    best = min(L2_GRID, key=lambda lam: (-scores[lam], lam))
    return best, {"mode": "grid", "val_accuracy": scores, "n_val": int(n_val)}


def save_head(head: SoftmaxHead, json_path) -> None:
    """Persist a head as a JSON metadata file plus a raw float32 blob.

    The blob holds the weight matrix row-major followed by the bias vector,
    little-endian float32. The blob file sits next to the JSON file with a
    ``.bin`` suffix.
    """
    json_path = Path(json_path)
    blob_path = json_path.with_suffix(".bin")
    blob = np.concatenate(
        [head.weights.astype("<f4").ravel(), head.biases.astype("<f4")]
    )
    blob_path.write_bytes(blob.tobytes())
    fingerprint = hashlib.sha256(json.dumps(
        {"task": head.task, "l2_lambda": head.l2_lambda,
         "checkpoint_id": head.checkpoint_id,
         "seed": head.train_meta.get("seed"),
         "n_train": head.train_meta.get("n_train")},
        sort_keys=True).encode()).hexdigest()[:16]
    meta = {
        "schema_version": HEAD_SCHEMA_VERSION,
        "task": head.task,
        "class_names": list(head.class_names),
        "dim": head.dim,
        "l2_lambda": head.l2_lambda,
        "checkpoint_id": head.checkpoint_id,
        "blob_file": blob_path.name,
        "train_meta": head.train_meta,
        "config_fingerprint": fingerprint,
    }
    json_path.write_text(json.dumps(meta, indent=2) + "\n")


def load_head(json_path) -> SoftmaxHead:
    json_path = Path(json_path)
    try:
        meta = json.loads(json_path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read head metadata {json_path}: {exc}") from exc
    blob_path = json_path.parent / meta["blob_file"]
    try:
        raw = np.frombuffer(blob_path.read_bytes(), dtype="<f4").astype(np.float64)
    except (OSError, ValueError) as exc:
        raise InputError(f"cannot read head blob {blob_path}: {exc}") from exc
    k = len(meta["class_names"])
    d = int(meta["dim"])
    if raw.size != k * d + k:
        raise InputError(
            f"head blob {blob_path} has {raw.size} floats, expected {k * d + k}"
        )
    return SoftmaxHead(
        task=meta["task"],
        class_names=tuple(meta["class_names"]),
        weights=raw[: k * d].reshape(k, d),
        biases=raw[k * d:],
        checkpoint_id=meta.get("checkpoint_id", ""),
        l2_lambda=float(meta.get("l2_lambda", 0.0)),
        train_meta=meta.get("train_meta", {}),
    )
