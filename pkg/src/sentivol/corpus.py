"""Forum posts, vocabularies and sparse bag-of-words features."""
from __future__ import annotations

import datetime as dt
import hashlib
import math
import unicodedata
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import EmptyCorpus, EmptyPost

POSITIVE = 1
NEGATIVE = 0

TOKENIZER_MODES = ("whitespace", "char_bigram")
NGRAM_MODES = ("uni", "uni_bi")
WEIGHTINGS = ("tf", "tfidf")


@dataclass(frozen=True)
class Post:
    id: str
    stock_id: str
    date: dt.date
    tokens: tuple[str, ...]
    label: int | None = None  # 1 positive, 0 negative, None unlabeled

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        if not self.tokens:
            raise EmptyPost(f"post {self.id!r} has no tokens")
        if not isinstance(self.date, dt.date):
            raise TypeError(f"post {self.id!r}: date must be a datetime.date")
        if self.label not in (None, POSITIVE, NEGATIVE):
            raise ValueError(f"post {self.id!r}: label must be 1, 0 or None")


def _strip_punctuation(token: str) -> str:
    return "".join(ch for ch in token if not unicodedata.category(ch).startswith("P"))


def tokenize(text: str, mode: str = "whitespace") -> list[str]:
    """Built-in fallback tokenizer for posts that arrive as raw text.

    ``whitespace`` splits on Unicode whitespace and drops punctuation
    characters. ``char_bigram`` emits overlapping character pairs of every
    non-whitespace run; a single-character run is emitted as itself.
    """
    if mode == "whitespace":
        out = (_strip_punctuation(tok) for tok in text.split())
        return [tok for tok in out if tok]
    if mode == "char_bigram":
        out = []
        for run in text.split():
            if len(run) == 1:
                out.append(run)
            else:
                out.extend(run[i : i + 2] for i in range(len(run) - 1))
        return out
    raise ValueError(f"unknown tokenizer mode {mode!r}")


def extract_terms(tokens: Sequence[str], ngram: str = "uni") -> list[str]:
    """Uni-grams, plus underscore-joined adjacent bi-grams under ``uni_bi``."""
    terms = list(tokens)
    if ngram == "uni_bi":
        terms.extend(f"{a}_{b}" for a, b in zip(tokens, tokens[1:]))
    elif ngram != "uni":
        raise ValueError(f"unknown n-gram policy {ngram!r}")
    return terms


@dataclass(frozen=True)
class Vocabulary:
    terms: tuple[str, ...]
    doc_freq: Mapping[str, int]
    corpus_size: int
    ngram: str = "uni"
    index: Mapping[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        object.__setattr__(self, "index", {t: i for i, t in enumerate(self.terms)})
        if len(self.index) != len(self.terms):
            raise ValueError("vocabulary terms must be unique")
        for t in self.terms:
            df = self.doc_freq.get(t, 0)
            if not 1 <= df <= self.corpus_size:
                raise ValueError(f"doc_freq({t!r})={df} outside [1, {self.corpus_size}]")

    def __len__(self):
        return len(self.terms)

    @property
    def fingerprint(self) -> str:
        h = hashlib.sha256(self.ngram.encode())
        for t in self.terms:
            h.update(b"\x00" + t.encode("utf-8"))
        return h.hexdigest()[:16]

    def idf(self, term: str) -> float:
        return math.log(self.corpus_size / self.doc_freq[term])

    def to_dict(self) -> dict:
        return {
            "terms": list(self.terms),
            "doc_freq": [self.doc_freq[t] for t in self.terms],
            "corpus_size": self.corpus_size,
            "ngram": self.ngram,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Vocabulary":
        return cls(
            terms=tuple(d["terms"]),
            doc_freq=dict(zip(d["terms"], d["doc_freq"])),
            corpus_size=d["corpus_size"],
            ngram=d.get("ngram", "uni"),
        )


def build_vocabulary(posts: Iterable[Post], ngram: str = "uni", min_df: int = 1) -> Vocabulary:
    if min_df < 1:
        raise ValueError("min_df must be >= 1")
    df: Counter[str] = Counter()
    m = 0
    for post in posts:
        m += 1
        df.update(set(extract_terms(post.tokens, ngram)))
    if m == 0:
        raise EmptyCorpus("no posts to build a vocabulary from")
    kept = sorted(t for t, c in df.items() if c >= min_df)
    if not kept:
        raise EmptyCorpus(f"no term occurs in at least {min_df} posts")
    return Vocabulary(terms=tuple(kept), doc_freq={t: df[t] for t in kept}, corpus_size=m, ngram=ngram)


class FeatureVector:
    """Sparse non-negative feature values keyed by vocabulary index."""

    __slots__ = ("indices", "values", "dim", "fingerprint")

    def __init__(self, entries: Mapping[int, float], dim: int, fingerprint: str = ""):
        items = sorted((int(i), float(v)) for i, v in entries.items() if v != 0)
        for i, v in items:
            if not 0 <= i < dim:
                raise IndexError(f"feature index {i} outside vocabulary of size {dim}")
            if v < 0:
                raise ValueError("feature values must be non-negative")
        self.indices = np.array([i for i, _ in items], dtype=np.intp)
        self.values = np.array([v for _, v in items], dtype=float)
        self.dim = dim
        self.fingerprint = fingerprint

    def to_dict(self) -> dict[int, float]:
        return dict(zip(self.indices.tolist(), self.values.tolist()))

    def dot(self, weights: np.ndarray) -> float:
        return float(weights[self.indices] @ self.values)

    def __len__(self):
        return len(self.indices)

    def __eq__(self, other):
        if not isinstance(other, FeatureVector):
            return NotImplemented
        return self.dim == other.dim and self.to_dict() == other.to_dict()

    def __repr__(self):
        return f"FeatureVector({self.to_dict()}, dim={self.dim})"


def featurize(post: Post | Sequence[str], vocab: Vocabulary, weighting: str = "tf") -> FeatureVector:
    """Term counts (``tf``) or count x ln(M / df) (``tfidf``); unknown terms are dropped."""
    tokens = post.tokens if isinstance(post, Post) else post
    counts = Counter(t for t in extract_terms(tokens, vocab.ngram) if t in vocab.index)
    if weighting == "tf":
        entries = {vocab.index[t]: float(c) for t, c in counts.items()}
    elif weighting == "tfidf":
        entries = {vocab.index[t]: c * vocab.idf(t) for t, c in counts.items()}
    else:
        raise ValueError(f"unknown weighting {weighting!r}")
    return FeatureVector(entries, len(vocab), vocab.fingerprint)
