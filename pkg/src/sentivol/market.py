"""Closing prices to volatility, normalised volatility and direction labels."""
from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .errors import DegenerateRange, DuplicateDate, EmptyIntersection, NonPositivePrice

PRICE_LIMIT = 0.1


@dataclass(frozen=True)
class PriceSeries:
    dates: tuple[dt.date, ...]
    closes: np.ndarray

    def __post_init__(self):
        if len(self.dates) != len(self.closes):
            raise ValueError("dates and closes differ in length")
        for a, b in zip(self.dates, self.dates[1:]):
            if b == a:
                raise DuplicateDate(f"duplicate date {b.isoformat()}")
            if b < a:
                raise ValueError("price dates must be strictly increasing")
        bad = np.flatnonzero(~(np.asarray(self.closes) > 0))
        if bad.size:
            i = int(bad[0])
            raise NonPositivePrice(f"non-positive close {self.closes[i]} on {self.dates[i].isoformat()}")

    def __len__(self):
        return len(self.dates)


def volatility(p_t: float, p_prev: float) -> float:
    """Relative one-day close change, clamped to the +-10% price limit."""
    if not (p_t > 0 and p_prev > 0):
        raise NonPositivePrice(f"prices must be positive, got {p_t}, {p_prev}")
    v = (p_t - p_prev) / p_prev
    return min(max(v, -PRICE_LIMIT), PRICE_LIMIT)


def fit_minmax(values: Sequence[float]) -> tuple[float, float]:
    values = np.asarray(values, dtype=float)
    if values.size < 2:
        raise DegenerateRange("min-max fit needs at least 2 values")
    lo, hi = float(values.min()), float(values.max())
    if not hi > lo:
        raise DegenerateRange(f"constant training range ({lo})")
    return lo, hi


def apply_minmax(v, lo: float, hi: float):
    """Scale into ``[0, 1]``; values outside the fitted range are clamped."""
    if not hi > lo:
        raise DegenerateRange(f"max {hi} must exceed min {lo}")
    out = np.clip((np.asarray(v, dtype=float) - lo) / (hi - lo), 0.0, 1.0)
    return float(out) if out.ndim == 0 else out


def binarize(v_norm) -> int:
    """Direction label: 1 (up) when strictly above 0.5."""
    return int(v_norm > 0.5)


@dataclass(frozen=True)
class VolatilitySeries:
    dates: tuple[dt.date, ...]
    v: np.ndarray
    v_norm: np.ndarray | None = None
    labels: np.ndarray | None = None
    norm_min: float | None = None
    norm_max: float | None = None

    def __len__(self):
        return len(self.dates)

    def normalized(self, lo: float, hi: float, label_mode: str = "threshold") -> "VolatilitySeries":
        v_norm = apply_minmax(self.v, lo, hi)
        return replace(self, v_norm=v_norm, labels=direction_labels(self.v, v_norm, label_mode),
                       norm_min=lo, norm_max=hi)


def direction_labels(v: np.ndarray, v_norm: np.ndarray, mode: str = "threshold") -> np.ndarray:
    """``threshold`` thresholds the normalised series at 0.5; ``sign`` uses raw ``v > 0``."""
    if mode == "threshold":
        return (np.asarray(v_norm) > 0.5).astype(int)
    if mode == "sign":
        return (np.asarray(v) > 0).astype(int)
    raise ValueError(f"unknown label mode {mode!r}")


def volatility_series(prices: PriceSeries) -> VolatilitySeries:
    """One value per day from the second onward (the first day has no predecessor)."""
    c = np.asarray(prices.closes, dtype=float)
    v = [volatility(c[i], c[i - 1]) for i in range(1, len(c))]
    return VolatilitySeries(dates=tuple(prices.dates[1:]), v=np.array(v, dtype=float))


@dataclass(frozen=True)
class AlignedDataset:
    """Per-day rows shared by the volatility and indicator series."""

    dates: tuple[dt.date, ...]
    v: np.ndarray
    z_b: np.ndarray
    z_n: np.ndarray
    n_pos: np.ndarray
    n_neg: np.ndarray
    b: np.ndarray
    n: np.ndarray
    v_norm: np.ndarray | None = None
    labels: np.ndarray | None = None
    norm_min: float | None = None
    norm_max: float | None = None

    def __len__(self):
        return len(self.dates)

    def normalized(self, fit_rows: int | None, label_mode: str = "threshold") -> "AlignedDataset":
        """Fit min-max on the first ``fit_rows`` rows (all rows if ``None``) and label every row."""
        fit = self.v if fit_rows is None else self.v[:fit_rows]
        lo, hi = fit_minmax(fit)
        v_norm = apply_minmax(self.v, lo, hi)
        return replace(self, v_norm=v_norm, labels=direction_labels(self.v, v_norm, label_mode),
                       norm_min=lo, norm_max=hi)

    def features(self, with_indicators: bool = True) -> np.ndarray:
        if self.v_norm is None:
            raise ValueError("dataset is not normalised yet")
        if with_indicators:
            return np.column_stack([self.v_norm, self.z_b, self.z_n])
        return self.v_norm.reshape(-1, 1)


def align(vol: VolatilitySeries, ind) -> AlignedDataset:
    """Inner join of volatility and indicator rows on date, chronologically ordered."""
    if len(vol) == 0 or len(ind) == 0:
        raise EmptyIntersection("cannot align an empty series")
    pos = {d: i for i, d in enumerate(ind.dates)}
    vi, ii = [], []
    for i, d in enumerate(vol.dates):
        j = pos.get(d)
        if j is not None:
            vi.append(i)
            ii.append(j)
    if not vi:
        raise EmptyIntersection("volatility and indicator series share no dates")
    order = np.argsort([vol.dates[i] for i in vi], kind="stable")
    vi = np.asarray(vi)[order]
    ii = np.asarray(ii)[order]
    ds = AlignedDataset(
        dates=tuple(vol.dates[i] for i in vi),
        v=np.asarray(vol.v)[vi],
        z_b=np.asarray(ind.z_b)[ii],
        z_n=np.asarray(ind.z_n)[ii],
        n_pos=np.asarray(ind.n_pos)[ii],
        n_neg=np.asarray(ind.n_neg)[ii],
        b=np.asarray(ind.b)[ii],
        n=np.asarray(ind.n)[ii],
    )
    if vol.v_norm is not None:
        ds = replace(ds, v_norm=np.asarray(vol.v_norm)[vi], labels=np.asarray(vol.labels)[vi],
                     norm_min=vol.norm_min, norm_max=vol.norm_max)
    return ds
