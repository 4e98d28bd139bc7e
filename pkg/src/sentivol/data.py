"""Reading and writing the on-disk formats: posts, prices, scores, indicators."""
from __future__ import annotations

import csv
import datetime as dt
import json
from typing import Iterable, NamedTuple

import numpy as np

from .corpus import NEGATIVE, POSITIVE, Post, tokenize
from .errors import DataError, DuplicateDate, IoFailure, NonPositivePrice, NoValidPosts
from .indicators import IndicatorSeries
from .market import AlignedDataset, PriceSeries
from .sentiment import ScoredPost

_LABELS = {"pos": POSITIVE, "neg": NEGATIVE, None: None}
_LABEL_NAMES = {POSITIVE: "pos", NEGATIVE: "neg", None: None}


class LoadedPosts(NamedTuple):
    posts: list[Post]
    errors: list[tuple[int, str]]  # (line number, reason)


def parse_post(obj: dict, tokenizer: str = "whitespace") -> Post:
    if not isinstance(obj, dict):
        raise ValueError("line is not a JSON object")
    if "tokens" in obj:
        tokens = obj["tokens"]
        if not isinstance(tokens, list) or not all(isinstance(t, str) for t in tokens):
            raise ValueError("'tokens' must be a list of strings")
    elif "text" in obj:
        tokens = tokenize(str(obj["text"]), tokenizer)
    else:
        raise ValueError("post needs 'tokens' or 'text'")
    label = obj.get("label")
    if label not in _LABELS:
        raise ValueError(f"label must be 'pos', 'neg' or null, got {label!r}")
    return Post(
        id=str(obj["id"]),
        stock_id=str(obj["stock"]),
        date=dt.date.fromisoformat(obj["date"]),
        tokens=tuple(tokens),
        label=_LABELS[label],
    )


def load_posts(path, tokenizer: str = "whitespace") -> LoadedPosts:
    """Parse a JSON Lines posts file, skipping (and reporting) malformed lines."""
    posts, errors = [], []
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                if not line.strip():
                    continue
                try:
                    posts.append(parse_post(json.loads(line), tokenizer))
                except (ValueError, KeyError, TypeError, DataError) as e:
                    errors.append((lineno, f"{type(e).__name__}: {e}"))
    except OSError as e:
        raise IoFailure(str(e)) from e
    if not posts:
        raise NoValidPosts(f"{path}: no valid posts ({len(errors)} malformed lines)")
    return LoadedPosts(posts, errors)


def post_to_json(post: Post) -> str:
    return json.dumps(
        {"id": post.id, "stock": post.stock_id, "date": post.date.isoformat(),
         "tokens": list(post.tokens), "label": _LABEL_NAMES[post.label]},
        ensure_ascii=False,
    )


def write_posts(posts: Iterable[Post], path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for p in posts:
            fh.write(post_to_json(p) + "\n")


def load_prices(path) -> PriceSeries:
    rows = []
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or not {"date", "close"} <= set(reader.fieldnames):
                raise DataError(f"{path}: expected header with 'date' and 'close'")
            for lineno, row in enumerate(reader, 2):
                try:
                    rows.append((dt.date.fromisoformat(row["date"].strip()), float(row["close"])))
                except (ValueError, AttributeError) as e:
                    raise DataError(f"{path}:{lineno}: {e}") from e
    except OSError as e:
        raise IoFailure(str(e)) from e
    rows.sort(key=lambda r: r[0])
    for (d0, _), (d1, _) in zip(rows, rows[1:]):
        if d0 == d1:
            raise DuplicateDate(f"duplicate price date {d1.isoformat()}")
    for d, c in rows:
        if not c > 0:
            raise NonPositivePrice(f"non-positive close {c} on {d.isoformat()}")
    return PriceSeries(tuple(d for d, _ in rows), np.array([c for _, c in rows], dtype=float))


def _fmt(x) -> str:
    return f"{float(x):.9g}"


def write_prices(prices: PriceSeries, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["date", "close"])
        for d, c in zip(prices.dates, prices.closes):
            w.writerow([d.isoformat(), f"{c:.4f}"])


def write_scores(scored: Iterable[ScoredPost], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["id", "stock", "date", "score", "label"])
        for s in scored:
            w.writerow([s.id, s.stock_id, s.date.isoformat(), _fmt(s.score), s.label])


def load_scores(path) -> list[ScoredPost]:
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            return [
                ScoredPost(r["id"], r["stock"], dt.date.fromisoformat(r["date"]), float(r["score"]))
                for r in csv.DictReader(fh)
            ]
    except OSError as e:
        raise IoFailure(str(e)) from e
    except (KeyError, ValueError) as e:
        raise DataError(f"{path}: malformed scores file ({e})") from e


INDICATOR_COLUMNS = ["date", "n_pos", "n_neg", "B", "N", "Z_B", "Z_N"]


def write_indicators(ind: IndicatorSeries, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(INDICATOR_COLUMNS)
        for i, d in enumerate(ind.dates):
            w.writerow([d.isoformat(), int(ind.n_pos[i]), int(ind.n_neg[i]), _fmt(ind.b[i]),
                        int(ind.n[i]), _fmt(ind.z_b[i]), _fmt(ind.z_n[i])])


def load_indicators(path) -> IndicatorSeries:
    """Read an indicator CSV back; per-day score sums are not stored and come back as NaN."""
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.DictReader(fh))
    except OSError as e:
        raise IoFailure(str(e)) from e
    try:
        col = lambda name, typ=float: np.array([typ(r[name]) for r in rows])  # noqa: E731
        nan = np.full(len(rows), np.nan)
        return IndicatorSeries(
            dates=tuple(dt.date.fromisoformat(r["date"]) for r in rows),
            n_pos=col("n_pos", int), n_neg=col("n_neg", int), s_pos=nan, s_neg=nan,
            b=col("B"), n=col("N", int), z_b=col("Z_B"), z_n=col("Z_N"),
        )
    except (KeyError, ValueError) as e:
        raise DataError(f"{path}: malformed indicator file ({e})") from e


DATASET_COLUMNS = INDICATOR_COLUMNS + ["v", "v_norm", "F"]


def write_dataset(ds: AlignedDataset, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(DATASET_COLUMNS)
        for i, d in enumerate(ds.dates):
            w.writerow([d.isoformat(), int(ds.n_pos[i]), int(ds.n_neg[i]), _fmt(ds.b[i]), int(ds.n[i]),
                        _fmt(ds.z_b[i]), _fmt(ds.z_n[i]), _fmt(ds.v[i]),
                        _fmt(ds.v_norm[i]), int(ds.labels[i])])


def load_dataset(path) -> AlignedDataset:
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.DictReader(fh))
    except OSError as e:
        raise IoFailure(str(e)) from e
    try:
        col = lambda name, typ=float: np.array([typ(r[name]) for r in rows])  # noqa: E731
        return AlignedDataset(
            dates=tuple(dt.date.fromisoformat(r["date"]) for r in rows),
            v=col("v"), z_b=col("Z_B"), z_n=col("Z_N"), n_pos=col("n_pos", int),
            n_neg=col("n_neg", int), b=col("B"), n=col("N", int),
            v_norm=col("v_norm"), labels=col("F", int),
        )
    except (KeyError, ValueError) as e:
        raise DataError(f"{path}: malformed dataset file ({e})") from e
