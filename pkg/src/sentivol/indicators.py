"""Daily bullishness and post-volume indicators with windowed z-scores."""
from __future__ import annotations

import bisect
import datetime as dt
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, EmptyCalendar, IndexOutOfRange

DEFAULT_EPSILON = 1e-4
DEFAULT_HALF_WIDTH = 5
WINDOW_MODES = ("trailing", "centered")
BULLISHNESS_MODES = ("continuous", "binary")


def bullishness_binary(n_pos: int, n_neg: int) -> float:
    """ln((1 + n_pos) / (1 + n_neg)) from post counts."""
    if n_pos < 0 or n_neg < 0:
        raise DomainError("post counts must be non-negative")
    # difference of logs keeps f(a, b) == -f(b, a) exact in floating point
    return math.log1p(n_pos) - math.log1p(n_neg)


def bullishness_continuous(s_pos: float, s_neg: float, epsilon: float = DEFAULT_EPSILON) -> float:
    """ln((eps + s_pos) / (eps + |s_neg|)) from summed signed scores."""
    if not epsilon > 0:
        raise DomainError("epsilon must be positive")
    if s_pos < 0 or s_neg > 0:
        raise DomainError(f"need s_pos >= 0 and s_neg <= 0, got {s_pos}, {s_neg}")
    return math.log((epsilon + s_pos) / (epsilon + abs(s_neg)))


def window_indices(n: int, t: int, half_width: int, mode: str = "trailing") -> range | list[int]:
    if mode == "trailing":
        return range(max(0, t - 2 * half_width), t)
    if mode == "centered":
        lo, hi = max(0, t - half_width), min(n - 1, t + half_width)
        return [i for i in range(lo, hi + 1) if i != t]
    raise ValueError(f"unknown window mode {mode!r}")


def zscore_window(series: Sequence[float], t: int, half_width: int = DEFAULT_HALF_WIDTH,
                  mode: str = "trailing") -> float:
    """z-score of ``series[t]`` against its neighbours.

    ``centered`` uses the ``half_width`` days either side of ``t`` (excluding
    ``t``), ``trailing`` the ``2 * half_width`` days before ``t``. Windows are
    truncated at the series ends. Mean and population standard deviation come
    from the window only; windows with fewer than two points or zero spread
    give 0.
    """
    x = np.asarray(series, dtype=float)
    if half_width < 1:
        raise ValueError("half_width must be >= 1")
    if not 0 <= t < len(x):
        raise IndexOutOfRange(f"index {t} outside series of length {len(x)}")
    w = x[list(window_indices(len(x), t, half_width, mode))]
    if w.size < 2:
        return 0.0
    sd = w.std()
    if sd == 0:
        return 0.0
    return float((x[t] - w.mean()) / sd)


def zscore_series(series: Sequence[float], half_width: int = DEFAULT_HALF_WIDTH,
                  mode: str = "trailing") -> np.ndarray:
    return np.array([zscore_window(series, t, half_width, mode) for t in range(len(series))])


@dataclass(frozen=True)
class IndicatorSeries:
    dates: tuple[dt.date, ...]
    n_pos: np.ndarray
    n_neg: np.ndarray
    s_pos: np.ndarray
    s_neg: np.ndarray
    b: np.ndarray
    n: np.ndarray
    z_b: np.ndarray
    z_n: np.ndarray
    epsilon: float = DEFAULT_EPSILON
    half_width: int = DEFAULT_HALF_WIDTH
    window_mode: str = "trailing"

    def __len__(self):
        return len(self.dates)


def build_indicator_series(posts: Iterable, trading_days: Sequence[dt.date],
                           epsilon: float = DEFAULT_EPSILON, half_width: int = DEFAULT_HALF_WIDTH,
                           window_mode: str = "trailing",
                           bullishness: str = "continuous") -> IndicatorSeries:
    """One indicator row per trading day from scored posts.

    ``posts`` are objects with ``date`` and signed ``score`` attributes (see
    ``sentiment.ScoredPost``). A post counts as positive when its score is
    above zero. Posts on non-trading days go to the next trading day; posts
    after the last trading day are ignored.
    """
    days = list(trading_days)
    if not days:
        raise EmptyCalendar("no trading days")
    if any(b <= a for a, b in zip(days, days[1:])):
        raise ValueError("trading days must be strictly increasing")
    if bullishness not in BULLISHNESS_MODES:
        raise ValueError(f"unknown bullishness mode {bullishness!r}")
    m = len(days)
    n_pos = np.zeros(m, dtype=int)
    n_neg = np.zeros(m, dtype=int)
    s_pos = np.zeros(m)
    s_neg = np.zeros(m)
    for p in posts:
        i = bisect.bisect_left(days, p.date)
        if i == m:
            continue
        if p.score > 0:
            n_pos[i] += 1
            s_pos[i] += p.score
        else:
            n_neg[i] += 1
            s_neg[i] += p.score
    if bullishness == "continuous":
        b = np.array([bullishness_continuous(sp, sn, epsilon) for sp, sn in zip(s_pos, s_neg)])
    else:
        b = np.array([bullishness_binary(a, c) for a, c in zip(n_pos, n_neg)])
    n = n_pos + n_neg
    return IndicatorSeries(
        dates=tuple(days), n_pos=n_pos, n_neg=n_neg, s_pos=s_pos, s_neg=s_neg, b=b, n=n,
        z_b=zscore_series(b, half_width, window_mode),
        z_n=zscore_series(n, half_width, window_mode),
        epsilon=epsilon, half_width=half_width, window_mode=window_mode,
    )
