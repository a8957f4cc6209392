"""Linear softmax head trained with a class-weighted cross-entropy.

The per-example loss is ``weight[y] * (-x[y] + log(sum_j exp(x[j])))`` where
``x`` are the logits. Weights are hyperparameters (typically ``[1, w]``
with ``w`` the minority weight), not inverse class frequencies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from ._seeding import rng
from .corpus_io import LabeledDataset
from .features import FeatureVector, encode_dataset
from .metrics import EvalReport, evaluate, mean_report

DEFAULT_SEEDS = (0, 1, 2)
MODEL_HEADER = "skewlens-model v1"


@dataclass(frozen=True)
class ClassWeights:
    w: np.ndarray

    def __post_init__(self) -> None:
        w = np.asarray(self.w, dtype=np.float64)
        if w.ndim != 1 or len(w) < 2:
            raise ValueError("class weights need one entry per class (at least two)")
        if not np.all(np.isfinite(w)) or np.any(w <= 0):
            raise ValueError(f"class weights must be positive and finite, got {w.tolist()}")
        object.__setattr__(self, "w", w)

    @classmethod
    def uniform(cls, n_classes: int = 2) -> "ClassWeights":
        return cls(np.ones(n_classes))

    @classmethod
    def minority(cls, weight: float) -> "ClassWeights":
        return cls(np.array([1.0, weight]))


@dataclass
class ModelParams:
    weight_matrix: np.ndarray
    bias: np.ndarray

    def __post_init__(self) -> None:
        self.weight_matrix = np.asarray(self.weight_matrix, dtype=np.float64)
        self.bias = np.asarray(self.bias, dtype=np.float64)
        if self.weight_matrix.ndim != 2 or self.bias.shape != (self.weight_matrix.shape[0],):
            raise ValueError("weight_matrix must be C x D and bias of length C")
        if self.weight_matrix.shape[0] < 2:
            raise ValueError("need at least two classes")
        if not (np.all(np.isfinite(self.weight_matrix)) and np.all(np.isfinite(self.bias))):
            raise ValueError("model parameters must be finite")

    @classmethod
    def zeros(cls, n_classes: int, dim: int) -> "ModelParams":
        return cls(np.zeros((n_classes, dim)), np.zeros(n_classes))

    @property
    def C(self) -> int:
        return self.weight_matrix.shape[0]

    @property
    def D(self) -> int:
        return self.weight_matrix.shape[1]

    def __eq__(self, other) -> bool:
        if not isinstance(other, ModelParams):
            return NotImplemented
        return np.array_equal(self.weight_matrix, other.weight_matrix) and np.array_equal(self.bias, other.bias)


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.1
    epochs: int = 50
    batch_size: int = 32
    seed: int = 0
    class_weights: ClassWeights = field(default_factory=ClassWeights.uniform)
    l2: float = 0.0

    def __post_init__(self) -> None:
        if not self.learning_rate > 0:
            raise ValueError(f"learning_rate must be > 0, got {self.learning_rate}")
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.l2 < 0:
            raise ValueError(f"l2 must be >= 0, got {self.l2}")
        if self.seed < 0:
            raise ValueError(f"seed must be >= 0, got {self.seed}")


def _as_array(x, dim: int) -> np.ndarray:
    if isinstance(x, FeatureVector):
        if x.dim != dim:
            raise ValueError(f"feature dim {x.dim} does not match model dim {dim}")
        return x.to_dense()
    arr = np.asarray(x, dtype=np.float64)
    if arr.shape[-1] != dim:
        raise ValueError(f"feature dim {arr.shape[-1]} does not match model dim {dim}")
    return arr


def forward(params: ModelParams, x) -> np.ndarray:
    """Logits ``W x + b``; ``x`` may also be an ``(n, D)`` matrix."""
    return _as_array(x, params.D) @ params.weight_matrix.T + params.bias


def _check_logits(logits, cls: int) -> np.ndarray:
    logits = np.asarray(logits, dtype=np.float64)
    if not np.all(np.isfinite(logits)):
        raise ValueError("logits must be finite")
    if not 0 <= cls < len(logits):
        raise ValueError(f"class {cls} out of range for {len(logits)} logits")
    return logits


def cross_entropy(logits, cls: int) -> float:
    logits = _check_logits(logits, cls)
    m = float(logits.max())
    return float(-logits[cls] + m + math.log(float(np.exp(logits - m).sum())))


def weighted_loss(logits, cls: int, cw: ClassWeights) -> float:
    return float(cw.w[cls]) * cross_entropy(logits, cls)


def softmax(logits: np.ndarray) -> np.ndarray:
    z = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def _unpack(batch, dim: int) -> tuple[np.ndarray, np.ndarray]:
    if not batch:
        raise ValueError("batch must be non-empty")
    X = np.stack([_as_array(x, dim) for x, _ in batch])
    y = np.array([c for _, c in batch], dtype=np.int64)
    return X, y


def batch_loss(params: ModelParams, batch, cw: ClassWeights, l2: float = 0.0) -> float:
    """Mean weighted loss over ``batch`` plus ``l2 * ||W||^2``."""
    X, y = _unpack(batch, params.D)
    logits = forward(params, X)
    losses = [weighted_loss(row, int(c), cw) for row, c in zip(logits, y)]
    return float(np.mean(losses)) + l2 * float(np.sum(params.weight_matrix**2))


def _gradient_arrays(params: ModelParams, X: np.ndarray, y: np.ndarray, cw: ClassWeights, l2: float):
    probs = softmax(X @ params.weight_matrix.T + params.bias)
    probs[np.arange(len(y)), y] -= 1.0
    dlogits = probs * cw.w[y][:, None] / len(y)
    dW = dlogits.T @ X
    if l2:
        dW = dW + 2.0 * l2 * params.weight_matrix
    return dW, dlogits.sum(axis=0)


def gradient(params: ModelParams, batch, cw: ClassWeights, l2: float = 0.0) -> tuple[np.ndarray, np.ndarray]:
    """Analytic gradient of :func:`batch_loss` with respect to ``(W, b)``."""
    X, y = _unpack(batch, params.D)
    if y.min() < 0 or y.max() >= params.C:
        raise ValueError("class index out of range")
    return _gradient_arrays(params, X, y, cw, l2)


def fit(X: np.ndarray, y: np.ndarray, cfg: TrainConfig, n_classes: int | None = None) -> ModelParams:
    """Minibatch gradient descent from zero parameters, shuffled per epoch by ``cfg.seed``."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if len(y) == 0:
        raise ValueError("cannot train on an empty dataset")
    n_classes = n_classes or len(cfg.class_weights.w)
    if len(cfg.class_weights.w) != n_classes:
        raise ValueError(f"{len(cfg.class_weights.w)} class weights for {n_classes} classes")
    if y.min() < 0 or y.max() >= n_classes:
        raise ValueError("label out of range")
    params = ModelParams.zeros(n_classes, X.shape[1])
    gen = rng(cfg.seed)
    for _ in range(cfg.epochs):
        order = gen.permutation(len(y))
        for start in range(0, len(y), cfg.batch_size):
            idx = order[start : start + cfg.batch_size]
            dW, db = _gradient_arrays(params, X[idx], y[idx], cfg.class_weights, cfg.l2)
            params.weight_matrix -= cfg.learning_rate * dW
            params.bias -= cfg.learning_rate * db
    if not (np.all(np.isfinite(params.weight_matrix)) and np.all(np.isfinite(params.bias))):
        raise FloatingPointError("training diverged; lower the learning rate")
    return params


def train(ds: LabeledDataset, encoder, cfg: TrainConfig) -> ModelParams:
    if len(ds) == 0:
        raise ValueError("cannot train on an empty dataset")
    return fit(encode_dataset(ds, encoder), ds.labels, cfg)


def predict(params: ModelParams, x):
    """Argmax of the logits; ties go to the lower class index. Accepts a matrix too."""
    logits = forward(params, x)
    return np.argmax(logits, axis=-1) if logits.ndim == 2 else int(np.argmax(logits))


def evaluate_model(params: ModelParams, ds: LabeledDataset, encoder, positive: int = 1) -> EvalReport:
    X = encode_dataset(ds, encoder)
    return evaluate(ds.labels, np.argmax(forward(params, X), axis=1), positive=positive, n_classes=params.C)


@dataclass(frozen=True)
class RepeatedResult:
    mean: EvalReport
    per_seed: tuple[EvalReport, ...]
    seeds: tuple[int, ...]
    params: tuple[ModelParams, ...] = ()


def run_repeated_multi(ds_train: LabeledDataset, evals: dict[str, LabeledDataset], encoder, cfg: TrainConfig, seeds: Sequence[int] = DEFAULT_SEEDS) -> dict[str, RepeatedResult]:
    """Train once per seed and score every dataset in ``evals`` with each model."""
    if not seeds:
        raise ValueError("need at least one seed")
    X = encode_dataset(ds_train, encoder)
    y = ds_train.labels
    encoded = {name: (encode_dataset(d, encoder), d.labels) for name, d in evals.items()}
    models = []
    reports: dict[str, list[EvalReport]] = {name: [] for name in evals}
    for seed in seeds:
        params = fit(X, y, replace(cfg, seed=int(seed)))
        models.append(params)
        for name, (Xe, ye) in encoded.items():
            reports[name].append(evaluate(ye, np.argmax(forward(params, Xe), axis=1), n_classes=params.C))
    return {
        name: RepeatedResult(mean_report(rs), tuple(rs), tuple(int(s) for s in seeds), tuple(models))
        for name, rs in reports.items()
    }


def run_repeated(ds_train: LabeledDataset, ds_eval: LabeledDataset, encoder, cfg: TrainConfig, seeds: Sequence[int] = DEFAULT_SEEDS) -> RepeatedResult:
    """Train/evaluate once per seed; the mean report averages every scalar."""
    return run_repeated_multi(ds_train, {"eval": ds_eval}, encoder, cfg, seeds)["eval"]


def save_model(params: ModelParams, path: str | Path) -> None:
    lines = [f"{MODEL_HEADER} C={params.C} D={params.D}"]
    lines += [" ".join(f"{v:.17g}" for v in row) for row in params.weight_matrix]
    lines.append(" ".join(f"{v:.17g}" for v in params.bias))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_model(path: str | Path) -> ModelParams:
    lines = Path(path).read_text(encoding="utf-8").split("\n")
    head = lines[0].split()
    if len(head) != 4 or " ".join(head[:2]) != MODEL_HEADER or not head[2].startswith("C=") or not head[3].startswith("D="):
        raise ValueError(f"{path}: not a skewlens model file")
    C, D = int(head[2][2:]), int(head[3][2:])
    body = [ln for ln in lines[1:] if ln.strip()]
    if len(body) != C + 1:
        raise ValueError(f"{path}: expected {C + 1} data lines, found {len(body)}")
    W = np.array([[float(v) for v in ln.split()] for ln in body[:C]]).reshape(C, D)
    b = np.array([float(v) for v in body[C].split()])
    return ModelParams(W, b)
