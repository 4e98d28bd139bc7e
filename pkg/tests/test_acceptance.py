"""End-to-end acceptance checks, one test per criterion.

Each test records a PASS/FAIL line that is printed in the pytest terminal
summary, then asserts.
"""
import filecmp
import math
import shutil
import time
from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES, make_post
from oracles import central_difference, elman_loss, rel_error, single_example_logloss
from sentivol import data, pipeline
from sentivol.baselines import RandModel
from sentivol.config import PipelineConfig
from sentivol.corpus import build_vocabulary
from sentivol.evaluation import (DEFAULT_K_RANGE, DEFAULT_REPLICATIONS, correlation, read_results_csv,
                                 sweep_k)
from sentivol.indicators import bullishness_binary, bullishness_continuous, zscore_window
from sentivol.rnn import ElmanRNN, rnn_backward
from sentivol.sentiment import TrainConfig, accuracy, labeled_examples, sigmoid, train_logistic
from sentivol.synth import SynthSpec, write_synthetic


def record(n, ok, detail, elapsed, limit):
    ok = ok and elapsed < limit
    ACCEPTANCE_LINES.append(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}  ({elapsed:.2f}s / {limit:g}s)")
    assert ok, detail


def test_1_logistic_gradient_oracle():
    t0 = time.perf_counter()
    rng = np.random.default_rng(1)
    worst = 0.0
    for _ in range(50):
        n = int(rng.integers(1, 21))
        w = rng.normal(size=n)
        x = rng.exponential(size=n) * (rng.random(n) < 0.7)
        y = int(rng.integers(0, 2))
        analytic = (sigmoid(w @ x) - y) * x
        numeric = central_difference(lambda: single_example_logloss(w, x, y), w, 1e-5)
        worst = max(worst, rel_error(analytic, numeric))
    record(1, worst < 1e-6, f"max rel err {worst:.2e} < 1e-6 over 50 trials", time.perf_counter() - t0, 1)


def test_2_separable_corpus_convergence():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2)
    filler = ["stock", "today", "board", "news", "price", "volume", "chart", "shares"]
    posts = []
    for i in range(200):
        marker = ["gain", "up", "long"] if i % 2 else ["loss", "down", "short"]
        toks = list(rng.choice(filler, 4)) + [str(rng.choice(marker))]
        posts.append(make_post(toks, i % 2, pid=str(i)))
    vocab = build_vocabulary(posts)
    model = train_logistic(posts, vocab, TrainConfig(seed=0, learning_rate=0.1, epochs=300))
    acc = accuracy(model, labeled_examples(posts, vocab))
    record(2, acc >= 0.99, f"train accuracy {acc:.3f} >= 0.99", time.perf_counter() - t0, 5)


def test_3_bptt_oracle():
    t0 = time.perf_counter()
    worst = 0.0
    for k in (3, 10, 15):
        rng = np.random.default_rng(100 + k)
        for _ in range(20):
            m = ElmanRNN.initialize(3, 25, 0.5, seed=int(rng.integers(1 << 31)))
            x = rng.normal(size=(k, 3))
            y = float(rng.uniform())
            _, grads = rnn_backward(m, x, y)
            params = m.params()
            for name, p in params.items():
                numeric = central_difference(lambda: elman_loss(params, x, y), p, 1e-5)
                worst = max(worst, rel_error(grads[name], numeric))
    record(3, worst < 1e-4, f"max rel err {worst:.2e} < 1e-4, H=25, k in 3/10/15, 20 trials each",
           time.perf_counter() - t0, 30)


def test_4_bullishness_oracles():
    t0 = time.perf_counter()
    worst = max(abs(bullishness_binary(a, b) - math.log((1 + a) / (1 + b)))
                for a in range(51) for b in range(51))
    rng = np.random.default_rng(4)
    s_pos = rng.exponential(size=1000) * rng.choice([1e-3, 1, 100], 1000)
    s_neg = -rng.exponential(size=1000) * rng.choice([1e-3, 1, 100], 1000)
    anti = max(abs(bullishness_continuous(p, n) + bullishness_continuous(-n, -p)) for p, n in zip(s_pos, s_neg))
    limit_ok = True
    epsilons = (1e-2, 1e-4, 1e-6, 1e-8, 1e-10)
    for p, n in zip(s_pos, s_neg):
        exact = math.log(p / -n)
        gaps = [abs(bullishness_continuous(p, n, eps) - exact) for eps in epsilons]
        # |ln(1 + eps/p) - ln(1 + eps/|n|)| <= eps / min(p, |n|)
        bound_ok = all(g <= eps / min(p, -n) + 1e-13 for g, eps in zip(gaps, epsilons))
        limit_ok &= gaps == sorted(gaps, reverse=True) and bound_ok
    ok = worst < 1e-12 and anti < 1e-12 and limit_ok
    record(4, ok, f"binary err {worst:.1e}, antisymmetry err {anti:.1e}, eps-limit {limit_ok}",
           time.perf_counter() - t0, 1)


def test_5_zscore_properties():
    t0 = time.perf_counter()
    rng = np.random.default_rng(5)
    causal = True
    for _ in range(20):
        x = rng.normal(size=50)
        t = int(rng.integers(50))
        z = zscore_window(x, t, 5, "trailing")
        y = x.copy()
        y[t + 1:] = rng.normal(size=49 - t) * 1000
        causal &= zscore_window(y, t, 5, "trailing") == z
    centered = max(abs(zscore_window(a * np.arange(2 * l + 1) + b, l, l, "centered"))
                   for a, b, l in zip(rng.normal(size=50) * 10, rng.normal(size=50) * 10, rng.integers(1, 8, 50)))
    flat = all(zscore_window([3.5] * 21, t, 5, mode) == 0.0 for t in range(21) for mode in ("trailing", "centered"))
    ok = causal and centered < 1e-9 and flat
    record(5, ok, f"causal {causal}, affine centre |z| {centered:.1e}, flat window -> 0 {flat}",
           time.perf_counter() - t0, 1)


def test_6_rand_calibration():
    t0 = time.perf_counter()
    rng = np.random.default_rng(6)
    label_sets = {"random": rng.integers(0, 2, 50), "all up": np.ones(50, int), "alternating": np.arange(50) % 2}
    means = {}
    for name, labels in label_sets.items():
        means[name] = np.mean([np.mean(RandModel(s).predict_labels(labels) == labels) for s in range(200)])
    ok = all(abs(m - 0.5) <= 0.03 for m in means.values())
    detail = ", ".join(f"{k} {v:.4f}" for k, v in means.items())
    record(6, ok, f"mean accuracy in 0.5 +/- 0.03: {detail}", time.perf_counter() - t0, 5)


@pytest.mark.slow
def test_7_synthetic_separation(synthetic_run):
    t0 = time.perf_counter()
    ds = data.load_dataset(Path(synthetic_run.output_dir) / pipeline.DATASET_FILE)
    rcfg = pipeline.rnn_config(synthetic_run)
    res = {r.method: r for r in sweep_k(ds, ["rnn_emm", "rnn"], [10], 20, 0, rcfg, 0.8, "SYN")}
    emm, rnn = res["rnn_emm"].mean, res["rnn"].mean
    ok = emm >= 0.75 and rnn <= emm - 0.10
    record(7, ok, f"RNN+EMM {emm:.3f} >= 0.75, RNN {rnn:.3f} <= RNN+EMM - 0.10 (k=10, 20 reps)",
           time.perf_counter() - t0, 180)


def test_8_indicator_correlation_signs(synthetic_run):
    t0 = time.perf_counter()
    ds = data.load_dataset(Path(synthetic_run.output_dir) / pipeline.DATASET_FILE)
    # Z_B on day t against the price change into day t+1
    r_b = correlation(ds.z_b[:-1], ds.v[1:])
    r_n = correlation(ds.z_n, np.abs(ds.v))
    record(8, r_b > 0.3 and r_n > 0, f"corr(Z_B, next-day change) {r_b:.3f} > 0.3, corr(Z_N, |V|) {r_n:.3f} > 0",
           time.perf_counter() - t0, 10)


@pytest.mark.slow
def test_9_protocol_fidelity(tmp_path):
    t0 = time.perf_counter()
    posts, prices = write_synthetic(SynthSpec(seed=0), tmp_path / "in")
    # few epochs keep 2 x 1300 trainings inside the time budget; the protocol is unchanged
    base = PipelineConfig(posts=str(posts), prices=str(prices), epochs=5)
    assert list(base.k_range) == list(DEFAULT_K_RANGE) and base.replications == DEFAULT_REPLICATIONS
    cfg = replace(base, output_dir=str(tmp_path / "out"))
    pipeline.run_all(cfg)
    first = tmp_path / "first"
    shutil.copytree(cfg.output_dir, first)
    shutil.rmtree(cfg.output_dir)
    pipeline.run_all(cfg)
    outs = [first, Path(cfg.output_dir)]
    results = read_results_csv(outs[0] / pipeline.RESULTS_FILE)
    cells = {(r.method, r.k): r.replications for r in results}
    counts_ok = cells == {(m, k): 50 for m in ("rnn_emm", "rnn") for k in range(3, 16)}
    names = sorted(p.name for p in outs[0].iterdir())
    assert names == sorted(p.name for p in outs[1].iterdir())
    match, mismatch, errors = filecmp.cmpfiles(outs[0], outs[1], names, shallow=False)
    identical = not mismatch and not errors
    record(9, counts_ok and identical,
           f"{len(results)} cells = 2 methods x 13 k, 50 reps each {counts_ok}; "
           f"{len(match)} output files byte-identical {identical} {mismatch or ''}",
           time.perf_counter() - t0, 600)
