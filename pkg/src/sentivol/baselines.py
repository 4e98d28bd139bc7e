"""Comparison predictors: feed-forward network, linear SVM and a coin flip.

MLP and SVM see each ``k``-day window flattened into one feature vector.
"""
from __future__ import annotations

from typing import Sequence

import numpy as np
from scipy.special import expit

from .errors import EmptyDataset
from .rnn import RnnTrainConfig, WindowSample, _check_samples

BASELINES = ("mlp", "svm", "rand")
SVM_L2 = 1e-4


def flatten(samples: Sequence[WindowSample]) -> np.ndarray:
    return np.stack([np.asarray(s.inputs, dtype=float).reshape(-1) for s in samples])


class MlpModel:
    """One hidden sigmoid layer and a sigmoid output trained on squared error."""

    def __init__(self, W1, b1, w2, b2):
        self.W1 = np.asarray(W1, dtype=float)
        self.b1 = np.asarray(b1, dtype=float)
        self.w2 = np.asarray(w2, dtype=float)
        self.b2 = np.asarray(b2, dtype=float).reshape(1)

    @classmethod
    def initialize(cls, n_features: int, hidden_size: int, init_scale: float, seed: int) -> "MlpModel":
        rng = np.random.default_rng(seed)
        s = init_scale
        return cls(rng.uniform(-s, s, (n_features, hidden_size)), rng.uniform(-s, s, hidden_size),
                   rng.uniform(-s, s, hidden_size), rng.uniform(-s, s, 1))

    def predict(self, samples) -> np.ndarray:
        X = flatten(samples)
        return expit(expit(X @ self.W1 + self.b1) @ self.w2 + self.b2[0])

    def predict_labels(self, samples) -> np.ndarray:
        return (self.predict(samples) > 0.5).astype(int)


class LinearSvmModel:
    def __init__(self, w, b):
        self.w = np.asarray(w, dtype=float)
        self.b = np.asarray(b, dtype=float).reshape(1)

    def decision(self, samples) -> np.ndarray:
        return flatten(samples) @ self.w + self.b[0]

    def predict_labels(self, samples) -> np.ndarray:
        return (self.decision(samples) > 0).astype(int)


class RandModel:
    """Fair coin per prediction; the same seed always replays the same flips."""

    def __init__(self, seed: int):
        self.seed = seed

    def predict_labels(self, samples) -> np.ndarray:
        return np.random.default_rng(self.seed).integers(0, 2, len(samples))


def train_mlp(samples, cfg: RnnTrainConfig, engine: str = "numba") -> MlpModel:
    _check_samples(samples)
    X = flatten(samples)
    Y = np.array([s.target for s in samples], dtype=float)
    model = MlpModel.initialize(X.shape[1], cfg.hidden_size, cfg.init_scale, cfg.seed)
    if cfg.learning_rate == 0:
        return model
    lr = float(cfg.learning_rate)
    if engine == "numba":
        from ._kernels import mlp_sgd

        mlp_sgd(X, Y, model.W1, model.b1, model.w2, model.b2, lr, int(cfg.epochs))
        return model
    W1, b1, w2, b2 = model.W1, model.b1, model.w2, model.b2
    for _ in range(cfg.epochs):
        for x, y in zip(X, Y):
            h = expit(x @ W1 + b1)
            pred = expit(h @ w2 + b2[0])
            d_out = (pred - y) * pred * (1 - pred)
            dh = w2 * d_out * h * (1 - h)
            w2 -= lr * d_out * h
            b2[0] -= lr * d_out
            W1 -= lr * np.outer(x, dh)
            b1 -= lr * dh
    return model


def train_svm(samples, cfg: RnnTrainConfig, l2: float = SVM_L2) -> LinearSvmModel:
    """Hinge-loss SGD on flattened windows, direction labels mapped to -1/+1."""
    from ._kernels import svm_sgd

    _check_samples(samples)
    X = flatten(samples)
    Y = np.array([1.0 if s.label == 1 else -1.0 for s in samples])
    w = np.zeros(X.shape[1])
    b = np.zeros(1)
    if cfg.learning_rate > 0:
        svm_sgd(X, Y, w, b, float(cfg.learning_rate), float(l2), int(cfg.epochs))
    return LinearSvmModel(w, b)


def train_baseline(kind: str, samples: Sequence[WindowSample], cfg: RnnTrainConfig):
    if len(samples) == 0:
        raise EmptyDataset("no training windows")
    if kind == "mlp":
        return train_mlp(samples, cfg)
    if kind == "svm":
        return train_svm(samples, cfg)
    if kind == "rand":
        return RandModel(cfg.seed)
    raise ValueError(f"unknown baseline {kind!r}")
