"""Seeded synthetic forum + price data where sentiment drives the next day's move.

Each trading day gets a bullish or bearish mood (fair coin). Posts are drawn
mostly from that mood, and the next day's price moves in the direction of
the day's post balance with probability ``coupling``. Post volume grows with
the size of the same day's price move when ``volume_coupling > 0``.
"""
from __future__ import annotations

import datetime as dt
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import NEGATIVE, POSITIVE, Post
from .data import write_posts, write_prices
from .errors import InvalidSpec
from .market import PriceSeries

POSITIVE_TERMS = ("rally", "buy", "bull", "surge", "breakout", "upgrade", "strong", "rebound")
NEGATIVE_TERMS = ("sell", "bear", "crash", "dump", "plunge", "downgrade", "weak", "panic")
NEUTRAL_TERMS = ("stock", "today", "market", "price", "volume", "chart", "news", "board",
                 "hold", "think", "shares", "trade", "week", "open", "close", "fund")

MOVE_MIN, MOVE_MAX = 0.01, 0.06
MOOD_PURITY = 0.75  # share of posts agreeing with the day's mood


@dataclass(frozen=True)
class SynthSpec:
    days: int = 250
    posts_per_day: int = 20
    coupling: float = 0.9
    noise: float = 0.1
    seed: int = 0
    volume_coupling: float = 0.5
    labeled_fraction: float = 0.3
    stock_id: str = "SYN"
    start: str = "2015-09-28"
    initial_price: float = 10.0

    def validate(self) -> None:
        if self.days < 50:
            raise InvalidSpec("synthetic data needs at least 50 days")
        if self.posts_per_day < 1:
            raise InvalidSpec("posts_per_day must be >= 1")
        for name in ("coupling", "noise", "labeled_fraction"):
            if not 0 <= getattr(self, name) <= 1:
                raise InvalidSpec(f"{name} must lie in [0, 1]")
        if not 0 <= self.volume_coupling <= 1:
            raise InvalidSpec("volume_coupling must lie in [0, 1]")
        if not self.initial_price > 0:
            raise InvalidSpec("initial_price must be positive")
        try:
            dt.date.fromisoformat(self.start)
        except ValueError as e:
            raise InvalidSpec(f"bad start date {self.start!r}") from e


@dataclass(frozen=True)
class SyntheticData:
    spec: SynthSpec
    posts: list[Post]
    prices: PriceSeries
    bullishness_sign: np.ndarray  # sign of each day's true post balance (+1/-1)
    moves: np.ndarray  # intended relative move of each day (0 on day 0)


def weekdays(start: dt.date, n: int) -> list[dt.date]:
    out, d = [], start
    while len(out) < n:
        if d.weekday() < 5:
            out.append(d)
        d += dt.timedelta(days=1)
    return out


def _post_tokens(rng: np.random.Generator, positive: bool, noise: float) -> list[str]:
    own, other = (POSITIVE_TERMS, NEGATIVE_TERMS) if positive else (NEGATIVE_TERMS, POSITIVE_TERMS)
    tokens = [str(t) for t in rng.choice(NEUTRAL_TERMS, size=rng.integers(2, 5))]
    markers = [str(t) for t in rng.choice(own, size=rng.integers(1, 3))]
    if rng.random() < noise:
        markers[0] = str(rng.choice(other))
    tokens.extend(markers)
    return [tokens[i] for i in rng.permutation(len(tokens))]


def generate_synthetic(spec: SynthSpec) -> SyntheticData:
    spec.validate()
    rng = np.random.default_rng(spec.seed)
    days = weekdays(dt.date.fromisoformat(spec.start), spec.days)
    moves = np.zeros(spec.days)
    signs = np.zeros(spec.days, dtype=int)
    closes = np.zeros(spec.days)
    price = round(spec.initial_price, 4)
    posts: list[Post] = []
    mid = (MOVE_MIN + MOVE_MAX) / 2
    for t, day in enumerate(days):
        size = abs(moves[t]) if t > 0 else mid
        scale = 1.0 + spec.volume_coupling * (size - mid) / (mid - MOVE_MIN)
        n = max(1, int(rng.poisson(spec.posts_per_day * scale)))
        bullish = rng.random() < 0.5
        positive = rng.random(n) < (MOOD_PURITY if bullish else 1 - MOOD_PURITY)
        n_pos = int(positive.sum())
        if 2 * n_pos == n:
            # break the tie toward the mood so every day has a definite balance
            idx = np.flatnonzero(positive != bullish)[0]
            positive[idx] = bullish
            n_pos = int(positive.sum())
        signs[t] = 1 if 2 * n_pos > n else -1
        for i in range(n):
            label = POSITIVE if positive[i] else NEGATIVE
            tokens = _post_tokens(rng, bool(positive[i]), spec.noise)
            labeled = rng.random() < spec.labeled_fraction
            posts.append(Post(f"{spec.stock_id}-{t:04d}-{i:03d}", spec.stock_id, day, tuple(tokens),
                              label if labeled else None))
        if t > 0:
            price = round(price * (1.0 + moves[t]), 4)
        closes[t] = price
        if t + 1 < spec.days:
            direction = signs[t] if rng.random() < spec.coupling else -signs[t]
            moves[t + 1] = direction * rng.uniform(MOVE_MIN, MOVE_MAX)
    return SyntheticData(spec, posts, PriceSeries(tuple(days), closes), signs, moves)


def write_synthetic(spec: SynthSpec, outdir) -> tuple[Path, Path]:
    """Write ``posts.jsonl`` and ``prices.csv`` into ``outdir``."""
    data = generate_synthetic(spec)
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    posts_path, prices_path = out / "posts.jsonl", out / "prices.csv"
    write_posts(data.posts, posts_path)
    write_prices(data.prices, prices_path)
    return posts_path, prices_path
