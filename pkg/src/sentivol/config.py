"""Flat pipeline configuration, stored as a JSON object of ``key: value`` pairs."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

from .errors import ConfigError

CHOICES = {
    "tokenizer": ("whitespace", "char_bigram"),
    "ngram": ("uni", "uni_bi"),
    "weighting": ("tf", "tfidf"),
    "window_mode": ("trailing", "centered"),
    "bullishness": ("continuous", "binary"),
    "normalization": ("train_fit", "whole_series"),
    "label_mode": ("threshold", "sign"),
}
KNOWN_METHODS = ("rnn_emm", "rnn", "mlp", "svm", "rand")


@dataclass(frozen=True)
class PipelineConfig:
    # paths
    posts: str = "posts.jsonl"
    prices: str = "prices.csv"
    output_dir: str = "out"
    stock: str = ""  # empty: every post feeds the indicators
    # corpus
    tokenizer: str = "whitespace"
    ngram: str = "uni"
    min_df: int = 1
    weighting: str = "tf"
    # sentiment model
    sentiment_learning_rate: float = 0.1
    sentiment_epochs: int = 300
    sentiment_shuffle: bool = True
    sentiment_bias: bool = False
    sentiment_seed: int = 0
    # indicators
    epsilon: float = 1e-4
    half_width: int = 5
    window_mode: str = "trailing"
    bullishness: str = "continuous"
    # market
    normalization: str = "train_fit"
    label_mode: str = "threshold"
    split_fraction: float = 0.8
    # predictors
    hidden_size: int = 25
    learning_rate: float = 0.05
    epochs: int = 500
    init_scale: float = 0.5
    k: int = 10
    k_min: int = 3
    k_max: int = 15
    replications: int = 50
    seed: int = 0
    methods: str = "rnn_emm,rnn"
    workers: int = 1

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        for key, allowed in CHOICES.items():
            if getattr(self, key) not in allowed:
                raise ConfigError(f"{key} must be one of {allowed}, got {getattr(self, key)!r}")
        if not 0 < self.split_fraction < 1:
            raise ConfigError("split_fraction must lie in (0, 1)")
        if not self.epsilon > 0:
            raise ConfigError("epsilon must be positive")
        positive = ("min_df", "sentiment_epochs", "half_width", "hidden_size", "epochs", "k",
                    "k_min", "replications", "workers")
        for key in positive:
            if getattr(self, key) < 1:
                raise ConfigError(f"{key} must be >= 1")
        if self.k_max < self.k_min:
            raise ConfigError("k_max must be >= k_min")
        for key in ("sentiment_learning_rate", "learning_rate", "init_scale"):
            if getattr(self, key) < 0:
                raise ConfigError(f"{key} must be non-negative")
        bad = [m for m in self.method_list if m not in KNOWN_METHODS]
        if bad or not self.method_list:
            raise ConfigError(f"methods must be a comma list drawn from {KNOWN_METHODS}")

    @property
    def method_list(self) -> list[str]:
        return [m.strip() for m in self.methods.split(",") if m.strip()]

    @property
    def k_range(self) -> range:
        return range(self.k_min, self.k_max + 1)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True) + "\n"

    def save(self, path) -> None:
        Path(path).write_text(self.to_json(), encoding="utf-8")

    @classmethod
    def from_mapping(cls, data: dict) -> "PipelineConfig":
        return cls().updated(data)

    @classmethod
    def from_json(cls, text: str) -> "PipelineConfig":
        try:
            data = json.loads(text) if text.strip() else {}
        except json.JSONDecodeError as e:
            raise ConfigError(f"config is not valid JSON: {e}") from e
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        return cls.from_mapping(data)

    @classmethod
    def load(cls, path) -> "PipelineConfig":
        try:
            return cls.from_json(Path(path).read_text(encoding="utf-8"))
        except OSError as e:
            raise ConfigError(f"cannot read config: {e}") from e

    def updated(self, data: dict) -> "PipelineConfig":
        """Copy with ``data`` applied; values are coerced to each key's type."""
        types = {f.name: type(f.default) for f in fields(self)}
        changes = {}
        for key, value in data.items():
            if key not in types:
                raise ConfigError(f"unknown config key {key!r}")
            changes[key] = _coerce(key, value, types[key])
        return replace(self, **changes)

    def with_overrides(self, pairs: list[str]) -> "PipelineConfig":
        """Apply ``KEY=VALUE`` strings, e.g. from repeated ``--set`` flags."""
        data = {}
        for pair in pairs:
            key, sep, value = pair.partition("=")
            if not sep:
                raise ConfigError(f"override {pair!r} is not KEY=VALUE")
            data[key.strip()] = value.strip()
        return self.updated(data)


def _coerce(key, value, typ):
    try:
        if typ is bool:
            if isinstance(value, bool):
                return value
            if isinstance(value, str) and value.lower() in ("true", "1", "yes", "on"):
                return True
            if isinstance(value, str) and value.lower() in ("false", "0", "no", "off"):
                return False
            raise ValueError(value)
        if typ is int:
            if isinstance(value, bool) or (isinstance(value, float) and not value.is_integer()):
                raise ValueError(value)
            return int(value)
        if typ is float:
            if isinstance(value, bool):
                raise ValueError(value)
            return float(value)
        if not isinstance(value, str):
            raise ValueError(value)
        return value
    except (TypeError, ValueError) as e:
        raise ConfigError(f"{key}: cannot use {value!r} as {typ.__name__}") from e
