"""Elman recurrent network for next-day volatility prediction.

The hidden layer is fed the current day's inputs together with its own state
from the previous day::

    h_t  = f(x_t W1 + h_{t-1} W2 + B1)
    pred = f(h_k W3 + B2)

with ``f`` the logistic sigmoid. Each window of ``k`` trading days starts from
a zero hidden state, and training minimises ``0.5 * (pred - target)**2`` by
per-sample stochastic gradient descent with full backpropagation through the
window.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np
from scipy.special import expit

from .errors import DimensionMismatch, EmptyDataset
from .market import binarize

PARAM_NAMES = ("W1", "W2", "W3", "B1", "B2")


@dataclass(frozen=True)
class WindowSample:
    """``k`` consecutive days of inputs and the following day's target."""

    inputs: np.ndarray  # (k, d_in)
    target: float  # normalised volatility of day t+1
    label: int  # direction label of day t+1

    def __post_init__(self):
        if self.inputs.ndim != 2 or self.inputs.shape[0] < 1:
            raise DimensionMismatch(f"window inputs must be (k, d_in), got {self.inputs.shape}")

    @property
    def k(self) -> int:
        return self.inputs.shape[0]


@dataclass(frozen=True)
class RnnTrainConfig:
    k: int = 10
    learning_rate: float = 0.05
    epochs: int = 500
    seed: int = 0
    init_scale: float = 0.5
    hidden_size: int = 25

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.learning_rate < 0:
            raise ValueError("learning_rate must be non-negative")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.hidden_size < 1:
            raise ValueError("hidden_size must be >= 1")


class ElmanRNN:
    """Parameters of a single-output Elman network.

    Shapes: ``W1 (d_in, H)``, ``W2 (H, H)``, ``W3 (H, 1)``, ``B1 (H,)``,
    ``B2 (1,)``.
    """

    def __init__(self, W1, W2, W3, B1, B2):
        self.W1 = np.asarray(W1, dtype=float)
        self.W2 = np.asarray(W2, dtype=float)
        self.W3 = np.asarray(W3, dtype=float).reshape(-1, 1)
        self.B1 = np.asarray(B1, dtype=float).reshape(-1)
        self.B2 = np.asarray(B2, dtype=float).reshape(1)
        H = self.W2.shape[0]
        if (
            self.W1.ndim != 2
            or self.W1.shape[1] != H
            or self.W2.shape != (H, H)
            or self.W3.shape != (H, 1)
            or self.B1.shape != (H,)
        ):
            raise DimensionMismatch("inconsistent Elman parameter shapes")
        for name in PARAM_NAMES:
            if not np.all(np.isfinite(getattr(self, name))):
                raise ValueError(f"non-finite entries in {name}")

    @classmethod
    def initialize(cls, input_size: int, hidden_size: int = 25, init_scale: float = 0.5,
                   seed: int | np.random.Generator = 0) -> "ElmanRNN":
        rng = np.random.default_rng(seed)
        s = init_scale
        return cls(
            W1=rng.uniform(-s, s, (input_size, hidden_size)),
            W2=rng.uniform(-s, s, (hidden_size, hidden_size)),
            W3=rng.uniform(-s, s, (hidden_size, 1)),
            B1=rng.uniform(-s, s, hidden_size),
            B2=rng.uniform(-s, s, 1),
        )

    @classmethod
    def zeros(cls, input_size: int, hidden_size: int = 25) -> "ElmanRNN":
        return cls(
            np.zeros((input_size, hidden_size)),
            np.zeros((hidden_size, hidden_size)),
            np.zeros((hidden_size, 1)),
            np.zeros(hidden_size),
            np.zeros(1),
        )

    @property
    def hidden_size(self) -> int:
        return self.W2.shape[0]

    @property
    def input_size(self) -> int:
        return self.W1.shape[0]

    def predict(self, samples: Sequence[WindowSample]) -> np.ndarray:
        return predict(self, samples)

    def predict_labels(self, samples: Sequence[WindowSample]) -> np.ndarray:
        return predict_labels(self, samples)

    def params(self) -> dict[str, np.ndarray]:
        return {name: getattr(self, name) for name in PARAM_NAMES}

    def copy(self) -> "ElmanRNN":
        return ElmanRNN(**{name: p.copy() for name, p in self.params().items()})

    def to_dict(self, seed: int | None = None, config: RnnTrainConfig | None = None) -> dict:
        return {
            "H": self.hidden_size,
            "d_in": self.input_size,
            **{name: p.tolist() for name, p in self.params().items()},
            "seed": seed,
            "config": asdict(config) if config is not None else None,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ElmanRNN":
        model = cls(*(d[name] for name in PARAM_NAMES))
        if model.hidden_size != d["H"] or model.input_size != d["d_in"]:
            raise DimensionMismatch("checkpoint H/d_in disagree with weight shapes")
        return model


def _check_inputs(model: ElmanRNN, inputs: np.ndarray) -> np.ndarray:
    inputs = np.asarray(inputs, dtype=float)
    if inputs.ndim != 2 or inputs.shape[1] != model.input_size or inputs.shape[0] < 1:
        raise DimensionMismatch(
            f"expected (k, {model.input_size}) inputs, got {inputs.shape}"
        )
    return inputs


def rnn_forward(model: ElmanRNN, inputs) -> tuple[float, np.ndarray]:
    """Roll the network over a ``(k, d_in)`` window.

    Returns the prediction for the next day and the ``(k, H)`` hidden states.
    """
    if isinstance(inputs, WindowSample):
        inputs = inputs.inputs
    inputs = _check_inputs(model, inputs)
    k = inputs.shape[0]
    hs = np.empty((k, model.hidden_size))
    # input projection does not depend on the recurrence
    xw = inputs @ model.W1 + model.B1
    h = np.zeros(model.hidden_size)
    for t in range(k):
        h = expit(xw[t] + h @ model.W2)
        hs[t] = h
    pred = float(expit(h @ model.W3[:, 0] + model.B2[0]))
    return pred, hs


def rnn_backward(model: ElmanRNN, inputs, target: float | None = None) -> tuple[float, dict[str, np.ndarray]]:
    """Squared-error loss and its exact gradient w.r.t. every parameter."""
    if isinstance(inputs, WindowSample):
        if target is None:
            target = inputs.target
        inputs = inputs.inputs
    inputs = _check_inputs(model, inputs)
    pred, hs = rnn_forward(model, inputs)
    return _backprop(model, inputs, hs, pred, float(target))


def _backprop(model, inputs, hs, pred, target):
    k, H = hs.shape
    resid = pred - target
    loss = 0.5 * resid * resid
    d_out = resid * pred * (1.0 - pred)

    gW3 = (hs[-1] * d_out).reshape(H, 1)
    gB2 = np.array([d_out])
    # error signals on the pre-activations of every step
    deltas = np.empty((k, H))
    dh = model.W3[:, 0] * d_out
    W2 = model.W2
    for t in range(k - 1, -1, -1):
        h = hs[t]
        da = dh * h * (1.0 - h)
        deltas[t] = da
        dh = W2 @ da
    gW1 = inputs.T @ deltas
    gB1 = deltas.sum(axis=0)
    gW2 = hs[:-1].T @ deltas[1:] if k > 1 else np.zeros((H, H))
    return loss, {"W1": gW1, "W2": gW2, "W3": gW3, "B1": gB1, "B2": gB2}


def _check_samples(samples: Sequence[WindowSample], input_size: int | None = None) -> int:
    if len(samples) == 0:
        raise EmptyDataset("no training windows")
    k, d = samples[0].inputs.shape
    if input_size is not None and d != input_size:
        raise DimensionMismatch(f"windows have width {d}, model expects {input_size}")
    for s in samples:
        if s.inputs.shape != (k, d):
            raise DimensionMismatch("windows must share k and d_in")
    return d


def mse(model: ElmanRNN, samples: Sequence[WindowSample]) -> float:
    errs = [(rnn_forward(model, s.inputs)[0] - s.target) ** 2 for s in samples]
    return float(np.mean(errs))


def rnn_train(samples: Sequence[WindowSample], cfg: RnnTrainConfig,
              input_size: int | None = None, engine: str = "numba") -> ElmanRNN:
    """Train an Elman network by per-sample SGD in chronological order.

    ``engine="numba"`` runs the compiled loop; ``"numpy"`` is the slower
    reference implementation of the same updates.
    """
    d_in = _check_samples(samples, input_size)
    model = ElmanRNN.initialize(d_in, cfg.hidden_size, cfg.init_scale, cfg.seed)
    if cfg.learning_rate == 0:
        return model
    if engine == "numba":
        from ._kernels import elman_sgd

        X = np.ascontiguousarray(np.stack([s.inputs for s in samples]), dtype=float)
        Y = np.array([s.target for s in samples], dtype=float)
        w3 = np.ascontiguousarray(model.W3[:, 0])
        elman_sgd(X, Y, model.W1, model.W2, w3, model.B1, model.B2,
                  float(cfg.learning_rate), int(cfg.epochs))
        model.W3[:, 0] = w3
    elif engine == "numpy":
        _numpy_sgd(model, samples, cfg)
    else:
        raise ValueError(f"unknown engine {engine!r}")
    return model


def _numpy_sgd(model: ElmanRNN, samples: Sequence[WindowSample], cfg: RnnTrainConfig) -> None:
    lr = cfg.learning_rate
    W1, W2, W3, B1, B2 = model.W1, model.W2, model.W3, model.B1, model.B2
    xs = [np.asarray(s.inputs, dtype=float) for s in samples]
    ys = [float(s.target) for s in samples]
    for _ in range(cfg.epochs):
        for x, y in zip(xs, ys):
            pred, hs = rnn_forward(model, x)
            _, g = _backprop(model, x, hs, pred, y)
            W1 -= lr * g["W1"]
            W2 -= lr * g["W2"]
            W3 -= lr * g["W3"]
            B1 -= lr * g["B1"]
            B2 -= lr * g["B2"]


def predict(model: ElmanRNN, samples: Sequence[WindowSample]) -> np.ndarray:
    return np.array([rnn_forward(model, s.inputs)[0] for s in samples])


def predict_direction(model: ElmanRNN, sample: WindowSample | np.ndarray) -> int:
    pred, _ = rnn_forward(model, sample)
    return binarize(pred)


def predict_labels(model: ElmanRNN, samples: Sequence[WindowSample]) -> np.ndarray:
    return np.array([predict_direction(model, s) for s in samples], dtype=int)
