"""Local training and evaluation with closed-form gradients.

Three trainer families share one flat parameter-vector representation:

* ``logistic``    -- multinomial softmax regression
* ``mlp``         -- one hidden tanh layer feeding a softmax head
* ``autoencoder`` -- one hidden tanh layer reconstructing the input;
                     drives the reconstruction-error anomaly detector

All gradients are derived by hand and the SGD update applies an L2 term
directly: theta <- theta - alpha * (grad + lambda * theta).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .data import Dataset
from .errors import (
    Diverged,
    EmptyData,
    InsufficientData,
    ShapeMismatch,
    UnknownTrainer,
)

TRAINER_KINDS = ("logistic", "mlp", "autoencoder")


@dataclass(frozen=True)
class Layout:
    """Per-tensor shapes and offsets backing a flat parameter vector."""

    trainer: str
    tensors: tuple[tuple[str, tuple[int, ...]], ...]

    @property
    def size(self) -> int:
        return sum(int(np.prod(shape)) for _, shape in self.tensors)

    def unpack(self, values: np.ndarray) -> dict[str, np.ndarray]:
        """Views into ``values``, one per tensor."""
        out = {}
        pos = 0
        for name, shape in self.tensors:
            extent = int(np.prod(shape))
            out[name] = values[pos:pos + extent].reshape(shape)
            pos += extent
        return out


@dataclass(frozen=True)
class ParamVector:
    """Flat float64 model parameters plus their layout."""

    values: np.ndarray
    layout: Layout

    def __post_init__(self):
        object.__setattr__(
            self, "values", np.ascontiguousarray(self.values, dtype=np.float64)
        )
        if self.values.shape != (self.layout.size,):
            raise ShapeMismatch(
                f"vector length {self.values.shape} does not match "
                f"layout size {self.layout.size}"
            )

    def __len__(self) -> int:
        return int(self.values.shape[0])

    def copy(self) -> "ParamVector":
        return ParamVector(self.values.copy(), self.layout)

    def with_values(self, values: np.ndarray) -> "ParamVector":
        return ParamVector(values, self.layout)


@dataclass(frozen=True)
class TrainingConfig:
    epochs: int = 20
    alpha: float = 0.1
    lam: float = 0.0
    rounds: int = 10
    batch_size: int = 32

    def __post_init__(self):
        if self.epochs < 1 or self.rounds < 1 or self.batch_size < 1:
            raise ValueError("epochs, rounds, and batch_size must be positive")
        if self.alpha < 0 or self.lam < 0:
            raise ValueError("alpha and lambda must be non-negative")


@dataclass(frozen=True)
class EvalMetrics:
    loss: float
    accuracy: float
    precision: float
    recall: float
    f1: float
    sample_count: int


@dataclass(frozen=True)
class AnomalyModel:
    """Autoencoder parameters plus a fitted reconstruction-error cutoff."""

    params: ParamVector
    threshold: float | None = None


def _softmax(z: np.ndarray) -> np.ndarray:
    shifted = z - z.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def _log_softmax(z: np.ndarray) -> np.ndarray:
    shifted = z - z.max(axis=1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))


def _onehot(y: np.ndarray, c: int) -> np.ndarray:
    out = np.zeros((y.shape[0], c))
    out[np.arange(y.shape[0]), y] = 1.0
    return out


def classification_metrics(y_true, y_pred, c: int) -> tuple[float, float, float, float]:
    """Accuracy plus macro-averaged precision/recall/F1 over all c classes.

    A class with an empty denominator contributes 0 to the macro mean.
    """
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)
    accuracy = float((y_true == y_pred).mean()) if y_true.size else 0.0
    precisions, recalls, f1s = [], [], []
    for k in range(c):
        tp = int(((y_pred == k) & (y_true == k)).sum())
        fp = int(((y_pred == k) & (y_true != k)).sum())
        fn = int(((y_pred != k) & (y_true == k)).sum())
        p = tp / (tp + fp) if tp + fp else 0.0
        r = tp / (tp + fn) if tp + fn else 0.0
        f = 2.0 * p * r / (p + r) if p + r else 0.0
        precisions.append(p)
        recalls.append(r)
        f1s.append(f)
    return (
        accuracy,
        float(np.mean(precisions)),
        float(np.mean(recalls)),
        float(np.mean(f1s)),
    )


class Trainer:
    """Shared SGD machinery; subclasses provide loss, gradient, predictions."""

    kind = ""

    def layout(self) -> Layout:
        raise NotImplementedError

    def init_params(self, seed: int) -> ParamVector:
        """Deterministic init: weights ~ N(0, 1/sqrt(fan_in)), zero biases."""
        rng = np.random.default_rng(seed)
        lay = self.layout()
        values = np.zeros(lay.size)
        tensors = lay.unpack(values)
        for name, shape in lay.tensors:
            if len(shape) == 2:
                tensors[name][...] = rng.standard_normal(shape) / math.sqrt(shape[0])
        return ParamVector(values, lay)

    def training_arrays(self, shard: Dataset) -> tuple[np.ndarray, np.ndarray]:
        """Rows of the shard this trainer actually fits on."""
        return shard.features, shard.labels

    def loss_and_grad(self, values, X, y) -> tuple[float, np.ndarray]:
        raise NotImplementedError

    def loss(self, values, X, y) -> float:
        return self.loss_and_grad(values, X, y)[0]

    def evaluate(self, params: ParamVector, test: Dataset,
                 train_shard: Dataset | None = None) -> EvalMetrics:
        raise NotImplementedError


class LogisticTrainer(Trainer):
    """Multinomial softmax regression with mean cross-entropy loss."""

    kind = "logistic"

    def __init__(self, d: int, c: int):
        if d < 1 or c < 2:
            raise UnknownTrainer(f"logistic needs d >= 1 and c >= 2, got {d}/{c}")
        self.d = d
        self.c = c

    def layout(self) -> Layout:
        return Layout("logistic", (("W", (self.d, self.c)), ("b", (self.c,))))

    def loss_and_grad(self, values, X, y):
        t = self.layout().unpack(values)
        B = X.shape[0]
        Z = X @ t["W"] + t["b"]
        logp = _log_softmax(Z)
        loss = float(-logp[np.arange(B), y].mean())
        dZ = (_softmax(Z) - _onehot(y, self.c)) / B
        grad = np.zeros_like(values)
        g = self.layout().unpack(grad)
        g["W"][...] = X.T @ dZ
        g["b"][...] = dZ.sum(axis=0)
        return loss, grad

    def predict(self, values, X) -> np.ndarray:
        t = self.layout().unpack(values)
        return np.argmax(X @ t["W"] + t["b"], axis=1)

    def evaluate(self, params, test, train_shard=None) -> EvalMetrics:
        if len(test) == 0:
            raise EmptyData("cannot evaluate on an empty test set")
        loss = self.loss(params.values, test.features, test.labels)
        preds = self.predict(params.values, test.features)
        acc, prec, rec, f1 = classification_metrics(test.labels, preds, self.c)
        return EvalMetrics(loss, acc, prec, rec, f1, len(test))


class MlpTrainer(Trainer):
    """One hidden tanh layer into a softmax head."""

    kind = "mlp"

    def __init__(self, d: int, c: int, hidden: int = 8):
        if d < 1 or c < 2 or hidden < 1:
            raise UnknownTrainer(f"mlp needs d,hidden >= 1 and c >= 2")
        self.d = d
        self.c = c
        self.hidden = hidden

    def layout(self) -> Layout:
        h = self.hidden
        return Layout("mlp", (
            ("W1", (self.d, h)), ("b1", (h,)),
            ("W2", (h, self.c)), ("b2", (self.c,)),
        ))

    def _forward(self, t, X):
        H = np.tanh(X @ t["W1"] + t["b1"])
        return H, H @ t["W2"] + t["b2"]

    def loss_and_grad(self, values, X, y):
        lay = self.layout()
        t = lay.unpack(values)
        B = X.shape[0]
        H, Z = self._forward(t, X)
        logp = _log_softmax(Z)
        loss = float(-logp[np.arange(B), y].mean())
        dZ = (_softmax(Z) - _onehot(y, self.c)) / B
        dH = dZ @ t["W2"].T
        dA = dH * (1.0 - H * H)
        grad = np.zeros_like(values)
        g = lay.unpack(grad)
        g["W2"][...] = H.T @ dZ
        g["b2"][...] = dZ.sum(axis=0)
        g["W1"][...] = X.T @ dA
        g["b1"][...] = dA.sum(axis=0)
        return loss, grad

    def predict(self, values, X) -> np.ndarray:
        t = self.layout().unpack(values)
        _, Z = self._forward(t, X)
        return np.argmax(Z, axis=1)

    def evaluate(self, params, test, train_shard=None) -> EvalMetrics:
        if len(test) == 0:
            raise EmptyData("cannot evaluate on an empty test set")
        loss = self.loss(params.values, test.features, test.labels)
        preds = self.predict(params.values, test.features)
        acc, prec, rec, f1 = classification_metrics(test.labels, preds, self.c)
        return EvalMetrics(loss, acc, prec, rec, f1, len(test))


class AutoencoderTrainer(Trainer):
    """Reconstruction model for anomaly scoring.

    Fits only the normal rows (label 0) of its shard, so anomalies keep a
    large reconstruction error. The per-sample error is the mean squared
    deviation across features; the training loss averages it over the
    batch. Labels never enter the loss.
    """

    kind = "autoencoder"

    def __init__(self, d: int, hidden: int = 4):
        if d < 1 or hidden < 1:
            raise UnknownTrainer("autoencoder needs d >= 1 and hidden >= 1")
        self.d = d
        self.hidden = hidden
        self.c = 2

    def layout(self) -> Layout:
        h = self.hidden
        return Layout("autoencoder", (
            ("W1", (self.d, h)), ("b1", (h,)),
            ("W2", (h, self.d)), ("b2", (self.d,)),
        ))

    def training_arrays(self, shard: Dataset):
        normal = shard.features[shard.labels == 0]
        if normal.shape[0] == 0:
            raise EmptyData("shard has no normal samples to fit on")
        # Targets equal inputs; the label slot is unused by the loss.
        return normal, np.zeros(normal.shape[0], dtype=np.int64)

    def _reconstruct(self, t, X):
        H = np.tanh(X @ t["W1"] + t["b1"])
        return H, H @ t["W2"] + t["b2"]

    def loss_and_grad(self, values, X, y):
        lay = self.layout()
        t = lay.unpack(values)
        B = X.shape[0]
        H, R = self._reconstruct(t, X)
        diff = R - X
        loss = float((diff * diff).mean())
        dR = 2.0 * diff / (B * self.d)
        dH = dR @ t["W2"].T
        dA = dH * (1.0 - H * H)
        grad = np.zeros_like(values)
        g = lay.unpack(grad)
        g["W2"][...] = H.T @ dR
        g["b2"][...] = dR.sum(axis=0)
        g["W1"][...] = X.T @ dA
        g["b1"][...] = dA.sum(axis=0)
        return loss, grad

    def reconstruction_errors(self, params: ParamVector, X: np.ndarray) -> np.ndarray:
        t = params.layout.unpack(params.values)
        _, R = self._reconstruct(t, X)
        return ((R - X) ** 2).mean(axis=1)

    def fit_threshold(self, params: ParamVector, shard: Dataset) -> AnomalyModel:
        normal = shard.features[shard.labels == 0]
        errors = self.reconstruction_errors(params, normal)
        return fit_anomaly_threshold(AnomalyModel(params), errors)

    def evaluate(self, params, test, train_shard=None) -> EvalMetrics:
        if len(test) == 0:
            raise EmptyData("cannot evaluate on an empty test set")
        if train_shard is None:
            raise EmptyData("anomaly evaluation needs a shard to fit the cutoff")
        model = self.fit_threshold(params, train_shard)
        errors = self.reconstruction_errors(params, test.features)
        preds = classify_anomalies(model, test.features, self)
        acc, prec, rec, f1 = classification_metrics(test.labels, preds, 2)
        return EvalMetrics(float(errors.mean()), acc, prec, rec, f1, len(test))


def make_trainer(kind: str, d: int, c: int, hidden: int = 8) -> Trainer:
    if kind == "logistic":
        return LogisticTrainer(d, c)
    if kind == "mlp":
        return MlpTrainer(d, c, hidden)
    if kind == "autoencoder":
        return AutoencoderTrainer(d, hidden)
    raise UnknownTrainer(f"unknown trainer kind: {kind!r}")


def init_params(trainer: Trainer, seed: int) -> ParamVector:
    return trainer.init_params(seed)


def train_local(params: ParamVector, shard: Dataset, cfg: TrainingConfig,
                seed: int, trainer: Trainer) -> ParamVector:
    """Run cfg.epochs passes of mini-batch SGD with the L2 update rule.

    The input vector is never mutated; identical arguments reproduce the
    output bit for bit.
    """
    if len(shard) == 0:
        raise EmptyData("cannot train on an empty shard")
    X, y = trainer.training_arrays(shard)
    m = X.shape[0]
    rng = np.random.default_rng(seed)
    values = params.values.copy()
    bs = min(cfg.batch_size, m)
    for _ in range(cfg.epochs):
        order = rng.permutation(m)
        for start in range(0, m, bs):
            idx = order[start:start + bs]
            loss, grad = trainer.loss_and_grad(values, X[idx], y[idx])
            if not math.isfinite(loss):
                raise Diverged(f"non-finite loss {loss}; reduce alpha")
            values = values - cfg.alpha * (grad + cfg.lam * values)
    if not np.isfinite(values).all():
        raise Diverged("non-finite parameters after training; reduce alpha")
    return params.with_values(values)


def evaluate(params: ParamVector, test: Dataset, trainer: Trainer,
             train_shard: Dataset | None = None) -> EvalMetrics:
    return trainer.evaluate(params, test, train_shard)


def fit_anomaly_threshold(model: AnomalyModel, train_errors) -> AnomalyModel:
    """Set the cutoff at the 95th percentile (linear interpolation)."""
    errors = np.asarray(train_errors, dtype=np.float64)
    if errors.shape[0] < 20:
        raise InsufficientData(
            f"need at least 20 training errors, got {errors.shape[0]}"
        )
    threshold = float(np.percentile(errors, 95.0))
    return replace(model, threshold=threshold)


def classify_anomalies(model: AnomalyModel, X: np.ndarray,
                       trainer: AutoencoderTrainer) -> np.ndarray:
    """Label 1 where the reconstruction error exceeds the fitted cutoff."""
    if model.threshold is None:
        raise InsufficientData("anomaly threshold has not been fitted")
    errors = trainer.reconstruction_errors(model.params, X)
    return (errors > model.threshold).astype(np.int64)
