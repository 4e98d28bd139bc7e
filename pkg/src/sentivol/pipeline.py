"""End-to-end steps. Each step reads its inputs from the previous step's files
in ``cfg.output_dir`` so the CLI subcommands can be run one at a time."""
from __future__ import annotations

import json
import logging
from pathlib import Path

from . import data
from .config import PipelineConfig
from .corpus import build_vocabulary
from .errors import DataError, DegenerateLabels
from .evaluation import (accuracy, compare_models, read_results_csv, split_windows, sweep_k,
                         train_rows, uses_indicators, write_comparison_csv, write_curves_csv,
                         write_results_csv, write_summary_csv)
from .indicators import build_indicator_series
from .market import align, volatility_series
from .rnn import RnnTrainConfig, rnn_train
from .baselines import train_baseline
from .sentiment import (TrainConfig, export_dictionary, labeled_examples, load_model, save_model,
                        score_posts, train_logistic)
from .sentiment import accuracy as sentiment_accuracy

log = logging.getLogger(__name__)

MODEL_FILE = "sentiment_model.json"
DICTIONARY_FILE = "dictionary.tsv"
SCORES_FILE = "scores.csv"
INDICATORS_FILE = "indicators.csv"
DATASET_FILE = "dataset.csv"
PREDICTIONS_FILE = "predictions.csv"
METRICS_FILE = "metrics.json"
RESULTS_FILE = "results.csv"
SUMMARY_FILE = "summary.csv"
CURVES_FILE = "curves.csv"
COMPARISON_FILE = "comparison.csv"


def _out(cfg: PipelineConfig) -> Path:
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load_posts(cfg: PipelineConfig):
    loaded = data.load_posts(cfg.posts, cfg.tokenizer)
    for lineno, reason in loaded.errors:
        log.warning("%s:%d skipped: %s", cfg.posts, lineno, reason)
    return loaded.posts


def rnn_config(cfg: PipelineConfig) -> RnnTrainConfig:
    return RnnTrainConfig(k=cfg.k, learning_rate=cfg.learning_rate, epochs=cfg.epochs,
                          seed=cfg.seed, init_scale=cfg.init_scale, hidden_size=cfg.hidden_size)


def train_sentiment(cfg: PipelineConfig) -> dict:
    posts = [p for p in _load_posts(cfg) if p.label is not None]
    if not posts:
        raise DegenerateLabels(f"{cfg.posts}: no labeled posts to train on")
    vocab = build_vocabulary(posts, cfg.ngram, cfg.min_df)
    tcfg = TrainConfig(seed=cfg.sentiment_seed, learning_rate=cfg.sentiment_learning_rate,
                       epochs=cfg.sentiment_epochs, shuffle=cfg.sentiment_shuffle,
                       add_bias=cfg.sentiment_bias)
    examples = labeled_examples(posts, vocab, cfg.weighting)
    model = train_logistic(examples, vocab, tcfg)
    out = _out(cfg)
    save_model(model, vocab, out / MODEL_FILE, cfg.weighting)
    n = export_dictionary(model, vocab, out / DICTIONARY_FILE)
    return {"labeled_posts": len(posts), "terms": n,
            "train_accuracy": sentiment_accuracy(model, examples)}


def score(cfg: PipelineConfig) -> dict:
    out = _out(cfg)
    model, vocab, weighting = load_model(out / MODEL_FILE)
    posts = _load_posts(cfg)
    if cfg.stock:
        posts = [p for p in posts if p.stock_id == cfg.stock]
    scored = score_posts(model, vocab, posts, weighting)
    data.write_scores(scored, out / SCORES_FILE)
    return {"scored": len(scored), "positive": sum(s.label for s in scored)}


def build_indicators(cfg: PipelineConfig) -> dict:
    out = _out(cfg)
    scored = data.load_scores(out / SCORES_FILE)
    prices = data.load_prices(cfg.prices)
    ind = build_indicator_series(scored, prices.dates, cfg.epsilon, cfg.half_width,
                                 cfg.window_mode, cfg.bullishness)
    data.write_indicators(ind, out / INDICATORS_FILE)
    return {"days": len(ind), "posts_counted": int(ind.n.sum())}


def prepare_market(cfg: PipelineConfig) -> dict:
    out = _out(cfg)
    vol = volatility_series(data.load_prices(cfg.prices))
    ind = data.load_indicators(out / INDICATORS_FILE)
    ds = align(vol, ind)
    fit_rows = train_rows(len(ds), cfg.split_fraction) if cfg.normalization == "train_fit" else None
    ds = ds.normalized(fit_rows, cfg.label_mode)
    data.write_dataset(ds, out / DATASET_FILE)
    return {"rows": len(ds), "norm_min": ds.norm_min, "norm_max": ds.norm_max,
            "up_days": int(ds.labels.sum())}


def train_predict(cfg: PipelineConfig) -> dict:
    """Train each configured method once at ``cfg.k`` and score it on the test days."""
    out = _out(cfg)
    ds = data.load_dataset(out / DATASET_FILE)
    rcfg = rnn_config(cfg)
    metrics = {}
    rows = []
    for method in cfg.method_list:
        train, test = split_windows(ds, cfg.k, uses_indicators(method), cfg.split_fraction)
        if not train or not test:
            raise DataError(f"k={cfg.k} leaves {len(train)} training / {len(test)} test windows")
        if method in ("rnn_emm", "rnn"):
            model = rnn_train(train, rcfg)
            (out / f"{method}_model.json").write_text(
                json.dumps(model.to_dict(seed=cfg.seed, config=rcfg)), encoding="utf-8")
        else:
            model = train_baseline(method, train, rcfg)
        pred = model.predict_labels(test)
        metrics[method] = accuracy(pred, [s.label for s in test])
        test_dates = ds.dates[len(ds) - len(test):]
        rows.extend((d.isoformat(), method, int(p), s.label) for d, p, s in zip(test_dates, pred, test))
    with open(out / PREDICTIONS_FILE, "w", encoding="utf-8") as fh:
        fh.write("date,method,predicted,actual\n")
        for r in rows:
            fh.write(",".join(map(str, r)) + "\n")
    (out / METRICS_FILE).write_text(
        json.dumps({"k": cfg.k, "accuracy": metrics}, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return {"k": cfg.k, "accuracy": metrics}


def sweep(cfg: PipelineConfig) -> dict:
    out = _out(cfg)
    ds = data.load_dataset(out / DATASET_FILE)
    results = sweep_k(ds, cfg.method_list, cfg.k_range, cfg.replications, cfg.seed,
                      rnn_config(cfg), cfg.split_fraction, cfg.stock or "all", cfg.workers)
    write_results_csv(results, out / RESULTS_FILE)
    write_summary_csv(results, out / SUMMARY_FILE)
    write_curves_csv(results, out / CURVES_FILE)
    return {"cells": len(results), "runs": sum(r.replications for r in results)}


def report(cfg: PipelineConfig, result_files: list[str] | None = None) -> list:
    """Cross-stock comparison from one or more results CSVs."""
    out = _out(cfg)
    files = result_files or [str(out / RESULTS_FILE)]
    by_stock: dict[str, list] = {}
    for f in files:
        for r in read_results_csv(f):
            by_stock.setdefault(r.stock_id, []).append(r)
    summary = compare_models(by_stock)
    write_comparison_csv(summary, out / COMPARISON_FILE)
    return summary


STEPS = {
    "train-sentiment": train_sentiment,
    "score-posts": score,
    "build-indicators": build_indicators,
    "prepare-market": prepare_market,
    "train-predict": train_predict,
    "sweep": sweep,
}


def run_all(cfg: PipelineConfig, with_sweep: bool = True) -> dict:
    _out(cfg)
    cfg.save(Path(cfg.output_dir) / "config.json")
    summary = {}
    for name, step in STEPS.items():
        if name == "sweep" and not with_sweep:
            continue
        summary[name] = step(cfg)
    if with_sweep:
        report(cfg)
    return summary

