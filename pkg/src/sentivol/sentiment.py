"""Logistic-regression polarity model and the term-weight dictionary it yields."""
from __future__ import annotations

import csv
import datetime as dt
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, NamedTuple, Sequence

import numpy as np
from scipy.special import expit

from .corpus import FeatureVector, Post, Vocabulary, featurize
from .errors import DegenerateLabels, DimensionMismatch, EmptyDataset, IoFailure, UnlabeledPost

LOSS_CLAMP = 1e-12


def sigmoid(z):
    """Logistic function; saturates to exactly 0.0 or 1.0 instead of overflowing."""
    out = expit(z)
    return float(out) if np.ndim(out) == 0 else out


def classify(h: float) -> int:
    return 1 if h > 0.5 else 0


@dataclass(frozen=True)
class TrainConfig:
    seed: int
    learning_rate: float = 0.1
    epochs: int = 300
    shuffle: bool = True
    add_bias: bool = False

    def __post_init__(self):
        if not self.learning_rate >= 0:
            raise ValueError("learning_rate must be non-negative")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")


class SentimentModel:
    """Weight per vocabulary term, bound to the vocabulary by its fingerprint."""

    def __init__(self, weights, vocab_fingerprint: str, bias: float = 0.0):
        self.weights = np.asarray(weights, dtype=float)
        if self.weights.ndim != 1:
            raise ValueError("weights must be a vector")
        if not np.all(np.isfinite(self.weights)) or not math.isfinite(bias):
            raise ValueError("weights must be finite")
        self.vocab_fingerprint = vocab_fingerprint
        self.bias = float(bias)

    @classmethod
    def zeros(cls, vocab: Vocabulary) -> "SentimentModel":
        return cls(np.zeros(len(vocab)), vocab.fingerprint)

    @classmethod
    def from_terms(cls, term_weights: dict[str, float], vocab: Vocabulary) -> "SentimentModel":
        """Model over ``vocab``; terms missing from ``term_weights`` get weight 0."""
        unknown = set(term_weights) - set(vocab.index)
        if unknown:
            raise DimensionMismatch(f"{len(unknown)} dictionary terms not in vocabulary, e.g. {sorted(unknown)[0]!r}")
        w = np.zeros(len(vocab))
        for term, weight in term_weights.items():
            w[vocab.index[term]] = weight
        return cls(w, vocab.fingerprint)

    def __len__(self):
        return len(self.weights)

    def _check(self, x: FeatureVector):
        if x.dim != len(self.weights) or (x.fingerprint and x.fingerprint != self.vocab_fingerprint):
            raise DimensionMismatch("feature vector was built against a different vocabulary")

    def to_dict(self) -> dict:
        d = {"vocab_fingerprint": self.vocab_fingerprint, "weights": self.weights.tolist()}
        if self.bias:
            d["bias"] = self.bias
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SentimentModel":
        return cls(d["weights"], d["vocab_fingerprint"], d.get("bias", 0.0))


def signed_score(model: SentimentModel, x: FeatureVector) -> float:
    """Pre-sigmoid logit ``w . x``: positive for bullish posts, negative for bearish."""
    model._check(x)
    return x.dot(model.weights) + model.bias


def score_post(model: SentimentModel, x: FeatureVector) -> float:
    """Probability that the post is positive."""
    return sigmoid(signed_score(model, x))


def _examples(dataset) -> list[tuple[FeatureVector, int]]:
    out = []
    for x, y in dataset:
        if y is None:
            raise UnlabeledPost("every example needs a 0/1 label")
        out.append((x, int(y)))
    if not out:
        raise EmptyDataset("empty dataset")
    return out


def loss(model: SentimentModel, dataset: Iterable[tuple[FeatureVector, int | None]]) -> float:
    """Average cross-entropy over ``(features, label)`` pairs."""
    total = 0.0
    examples = _examples(dataset)
    for x, y in examples:
        h = min(max(score_post(model, x), LOSS_CLAMP), 1.0 - LOSS_CLAMP)
        total += math.log(h) if y == 1 else math.log(1.0 - h)
    return -total / len(examples)


def accuracy(model: SentimentModel, dataset) -> float:
    examples = _examples(dataset)
    return sum(classify(score_post(model, x)) == y for x, y in examples) / len(examples)


def labeled_examples(posts: Iterable[Post], vocab: Vocabulary, weighting: str = "tf"):
    out = []
    for p in posts:
        if p.label is None:
            raise UnlabeledPost(f"post {p.id!r} has no label")
        out.append((featurize(p, vocab, weighting), p.label))
    return out


def train_logistic(posts: Sequence[Post] | Sequence[tuple[FeatureVector, int]], vocab: Vocabulary,
                   cfg: TrainConfig, weighting: str = "tf", on_epoch=None) -> SentimentModel:
    """Per-example gradient descent from zero weights: ``w -= lr * (h - y) * x``.

    ``posts`` may be labeled posts or already featurized ``(x, y)`` pairs.
    ``on_epoch(epoch, model)``, if given, sees a snapshot after every pass.
    """
    if posts and isinstance(posts[0], Post):
        examples = labeled_examples(posts, vocab, weighting)
    else:
        examples = _examples(posts)
    if not examples:
        raise EmptyDataset("no labeled posts")
    labels = {y for _, y in examples}
    if labels != {0, 1}:
        raise DegenerateLabels("training needs both positive and negative posts")
    for x, _ in examples:
        if x.dim != len(vocab) or (x.fingerprint and x.fingerprint != vocab.fingerprint):
            raise DimensionMismatch("features were built against a different vocabulary")

    w = np.zeros(len(vocab))
    b = 0.0
    lr = cfg.learning_rate
    idx = [x.indices for x, _ in examples]
    val = [x.values for x, _ in examples]
    ys = [float(y) for _, y in examples]
    rng = np.random.default_rng(cfg.seed)
    order = np.arange(len(examples))
    for epoch in range(cfg.epochs):
        if cfg.shuffle:
            order = rng.permutation(len(examples))
        for k in order:
            ix, v = idx[k], val[k]
            h = sigmoid(w[ix] @ v + b)
            step = lr * (h - ys[k])
            w[ix] -= step * v
            if cfg.add_bias:
                b -= step
        if on_epoch is not None:
            on_epoch(epoch, SentimentModel(w.copy(), vocab.fingerprint, b))
    return SentimentModel(w, vocab.fingerprint, b)


def export_dictionary(model: SentimentModel, vocab: Vocabulary, path) -> int:
    """Write ``term<TAB>weight`` rows, strongest positive first; ties break lexicographically."""
    if model.vocab_fingerprint != vocab.fingerprint or len(model) != len(vocab):
        raise DimensionMismatch("model is not bound to this vocabulary")
    rows = sorted(zip(vocab.terms, model.weights.tolist()), key=lambda r: (-r[1], r[0]))
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write("term\tweight\n")
            for term, weight in rows:
                fh.write(f"{term}\t{weight:.9g}\n")
    except OSError as e:
        raise IoFailure(str(e)) from e
    return len(rows)


def load_dictionary(path) -> dict[str, float]:
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh, delimiter="\t", quoting=csv.QUOTE_NONE)
            header = next(reader, None)
            if header != ["term", "weight"]:
                raise IoFailure(f"{path}: expected header 'term\\tweight'")
            return {term: float(weight) for term, weight in reader}
    except OSError as e:
        raise IoFailure(str(e)) from e


def save_model(model: SentimentModel, vocab: Vocabulary, path, weighting: str = "tf") -> None:
    """JSON model file; the vocabulary rides along so the file is self-contained."""
    d = model.to_dict()
    d["vocabulary"] = vocab.to_dict()
    d["weighting"] = weighting
    Path(path).write_text(json.dumps(d), encoding="utf-8")


def load_model(path) -> tuple[SentimentModel, Vocabulary, str]:
    d = json.loads(Path(path).read_text(encoding="utf-8"))
    vocab = Vocabulary.from_dict(d["vocabulary"])
    model = SentimentModel.from_dict(d)
    if model.vocab_fingerprint != vocab.fingerprint:
        raise DimensionMismatch(f"{path}: model fingerprint does not match its vocabulary")
    return model, vocab, d.get("weighting", "tf")


class ScoredPost(NamedTuple):
    id: str
    stock_id: str
    date: dt.date
    score: float  # signed score (logit)

    @property
    def label(self) -> int:
        # same decision as classify(sigmoid(score)) but immune to sigmoid rounding at |z| < 1e-16
        return int(self.score > 0)


def score_posts(model: SentimentModel, vocab: Vocabulary, posts: Iterable[Post],
                weighting: str = "tf") -> list[ScoredPost]:
    return [
        ScoredPost(p.id, p.stock_id, p.date, signed_score(model, featurize(p, vocab, weighting)))
        for p in posts
    ]
