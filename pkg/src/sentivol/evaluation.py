"""Accuracy, k-sweeps over replicated trainings, and cross-stock comparison."""
from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Iterable, Mapping, Sequence

import numpy as np

from .baselines import train_baseline
from .errors import (DegenerateSeries, EmptyVector, InsufficientData, LengthMismatch,
                     MissingCell)
from .market import AlignedDataset
from .rnn import RnnTrainConfig, WindowSample, rnn_train

METHODS = ("rnn_emm", "rnn", "mlp", "svm", "rand")
METHOD_LABELS = {"rnn_emm": "RNN+EMM", "rnn": "RNN", "mlp": "MLP", "svm": "SVM", "rand": "RAND"}
DEFAULT_K_RANGE = range(3, 16)
DEFAULT_REPLICATIONS = 50
MIN_TEST_SAMPLES = 20


def accuracy(predicted: Sequence[int], actual: Sequence[int]) -> float:
    """Fraction of positions where the predicted label equals the real one."""
    p = np.asarray(predicted)
    a = np.asarray(actual)
    if p.shape != a.shape:
        raise LengthMismatch(f"{p.size} predictions vs {a.size} labels")
    if a.size == 0:
        raise EmptyVector("no labels to score")
    return float(np.count_nonzero(p == a)) / a.size


def correlation(a: Sequence[float], b: Sequence[float]) -> float:
    """Pearson product-moment correlation."""
    x = np.asarray(a, dtype=float)
    y = np.asarray(b, dtype=float)
    if x.shape != y.shape:
        raise LengthMismatch("series differ in length")
    if x.size < 3:
        raise LengthMismatch("correlation needs at least 3 points")
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    if sxx == 0 or syy == 0:
        raise DegenerateSeries("constant series has no correlation")
    r = float(dx @ dy) / math.sqrt(sxx * syy)
    return min(1.0, max(-1.0, r))


def uses_indicators(method: str) -> bool:
    return method == "rnn_emm"


def make_windows(dataset: AlignedDataset, k: int, with_indicators: bool = True) -> list[WindowSample]:
    """Sliding ``k``-day windows; the window ending on day ``j-1`` targets day ``j``."""
    X = dataset.features(with_indicators)
    return [
        WindowSample(X[j - k : j], float(dataset.v_norm[j]), int(dataset.labels[j]))
        for j in range(k, len(dataset))
    ]


def train_rows(n_rows: int, train_fraction: float) -> int:
    if not 0 < train_fraction < 1:
        raise ValueError("train fraction must lie in (0, 1)")
    return int(math.floor(train_fraction * n_rows))


def split_windows(dataset: AlignedDataset, k: int, with_indicators: bool,
                  train_fraction: float = 0.8) -> tuple[list[WindowSample], list[WindowSample]]:
    """Chronological split by target day: targets before the cut train, the rest test.

    The test set is the same days for every ``k``.
    """
    cut = train_rows(len(dataset), train_fraction)
    windows = make_windows(dataset, k, with_indicators)
    # window i targets row i + k
    n_train = max(0, cut - k)
    return windows[:n_train], windows[n_train:]


def check_sweep_data(n_rows: int, k_values: Iterable[int], train_fraction: float) -> None:
    cut = train_rows(n_rows, train_fraction)
    n_test = n_rows - cut
    if n_test < MIN_TEST_SAMPLES:
        raise InsufficientData(f"{n_test} test days; need at least {MIN_TEST_SAMPLES}")
    k_max = max(k_values)
    if cut - k_max < 1:
        raise InsufficientData(f"no training windows left for k={k_max} ({cut} training days)")


def run_cell(dataset: AlignedDataset, method: str, k: int, seed: int,
             cfg: RnnTrainConfig | None = None, train_fraction: float = 0.8) -> float:
    """Train one model and return its test accuracy."""
    cfg = replace(cfg or RnnTrainConfig(), k=k, seed=seed)
    train, test = split_windows(dataset, k, uses_indicators(method), train_fraction)
    if not train or not test:
        raise InsufficientData(f"k={k}: {len(train)} training / {len(test)} test windows")
    if method in ("rnn_emm", "rnn"):
        model = rnn_train(train, cfg)
    elif method in ("mlp", "svm", "rand"):
        model = train_baseline(method, train, cfg)
    else:
        raise ValueError(f"unknown method {method!r}")
    return accuracy(model.predict_labels(test), [s.label for s in test])


@dataclass(frozen=True)
class ExperimentResult:
    stock_id: str
    method: str
    k: int
    accuracies: tuple[float, ...]

    @property
    def replications(self) -> int:
        return len(self.accuracies)

    @property
    def mean(self) -> float:
        return float(np.mean(self.accuracies))

    @property
    def std(self) -> float:
        # population std: a single replication reports 0
        return float(np.std(self.accuracies))


def _cell(args):
    dataset, method, k, seed, cfg, train_fraction = args
    return run_cell(dataset, method, k, seed, cfg, train_fraction)


def sweep_k(dataset: AlignedDataset, methods: Sequence[str], k_range: Iterable[int] = DEFAULT_K_RANGE,
            replications: int = DEFAULT_REPLICATIONS, base_seed: int = 0,
            cfg: RnnTrainConfig | None = None, train_fraction: float = 0.8,
            stock_id: str = "", workers: int = 1) -> list[ExperimentResult]:
    """Train every (method, k) ``replications`` times with seeds ``base_seed + r``."""
    k_values = list(k_range)
    if replications < 1:
        raise ValueError("replications must be >= 1")
    check_sweep_data(len(dataset), k_values, train_fraction)
    cells = [(m, k, base_seed + r) for m in methods for k in k_values for r in range(replications)]
    jobs = [(dataset, m, k, s, cfg, train_fraction) for m, k, s in cells]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            accs = list(pool.map(_cell, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        accs = [_cell(j) for j in jobs]
    grouped: dict[tuple[str, int], list[float]] = {}
    for (m, k, _), acc in zip(cells, accs):
        grouped.setdefault((m, k), []).append(acc)
    return [ExperimentResult(stock_id, m, k, tuple(grouped[(m, k)])) for m in methods for k in k_values]


def best_k(results: Iterable[ExperimentResult]) -> dict[str, ExperimentResult]:
    """Highest mean accuracy per method; the smallest k wins ties."""
    best: dict[str, ExperimentResult] = {}
    for r in sorted(results, key=lambda r: (r.method, r.k)):
        cur = best.get(r.method)
        if cur is None or r.mean > cur.mean:
            best[r.method] = r
    return best


@dataclass(frozen=True)
class MethodSummary:
    method: str
    mean: float
    std: float
    n_stocks: int


def compare_models(results_by_stock: Mapping[str, Iterable[ExperimentResult]],
                   methods: Sequence[str] | None = None) -> list[MethodSummary]:
    """MEAN and STD over stocks of each stock's best-k mean accuracy."""
    best = {stock: best_k(rs) for stock, rs in results_by_stock.items()}
    if not best:
        raise MissingCell("no stocks to compare")
    if methods is None:
        methods = [m for m in METHODS if any(m in b for b in best.values())]
    out = []
    for m in methods:
        vals = []
        for stock, b in best.items():
            if m not in b:
                raise MissingCell(f"stock {stock!r} has no results for {m}")
            vals.append(b[m].mean)
        out.append(MethodSummary(m, float(np.mean(vals)), float(np.std(vals)), len(vals)))
    return out


def _fmt(x: float) -> str:
    return f"{x:.9g}"


def write_results_csv(results: Iterable[ExperimentResult], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["stock", "method", "k", "replication", "accuracy"])
        for r in results:
            for i, acc in enumerate(r.accuracies):
                w.writerow([r.stock_id, r.method, r.k, i, _fmt(acc)])


def read_results_csv(path) -> list[ExperimentResult]:
    cells: dict[tuple[str, str, int], list[tuple[int, float]]] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            key = (row["stock"], row["method"], int(row["k"]))
            cells.setdefault(key, []).append((int(row["replication"]), float(row["accuracy"])))
    return [ExperimentResult(s, m, k, tuple(a for _, a in sorted(v))) for (s, m, k), v in cells.items()]


def write_summary_csv(results: Iterable[ExperimentResult], path) -> None:
    """Best k per (stock, method); mean/std are over replications at that k."""
    by_stock: dict[str, list[ExperimentResult]] = {}
    for r in results:
        by_stock.setdefault(r.stock_id, []).append(r)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["stock", "method", "best_k", "mean", "std"])
        for stock in sorted(by_stock):
            best = best_k(by_stock[stock])
            for m in sorted(best, key=_method_order):
                r = best[m]
                w.writerow([stock, m, r.k, _fmt(r.mean), _fmt(r.std)])


def write_curves_csv(results: Iterable[ExperimentResult], path) -> None:
    """Accuracy-vs-k curve per method, ready for plotting."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["stock", "method", "k", "mean", "std", "replications"])
        for r in sorted(results, key=lambda r: (r.stock_id, _method_order(r.method), r.k)):
            w.writerow([r.stock_id, r.method, r.k, _fmt(r.mean), _fmt(r.std), r.replications])


def write_comparison_csv(summary: Iterable[MethodSummary], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["method", "mean", "std", "n_stocks"])
        for s in summary:
            w.writerow([METHOD_LABELS.get(s.method, s.method), _fmt(s.mean), _fmt(s.std), s.n_stocks])


def _method_order(m: str) -> int:
    return METHODS.index(m) if m in METHODS else len(METHODS)
