import math

import numpy as np
import pytest

from oracles import central_difference, elman_loss, rel_error
from sentivol.errors import DimensionMismatch, EmptyDataset
from sentivol.rnn import (ElmanRNN, RnnTrainConfig, WindowSample, mse, predict_labels, rnn_backward,
                          rnn_forward, rnn_train)


def sig(z):
    return 1 / (1 + math.exp(-z))


def random_samples(n, k, d, seed=0):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        y = float(rng.uniform())
        out.append(WindowSample(rng.normal(size=(k, d)), y, int(y > 0.5)))
    return out


class TestForward:
    def test_zero_model_predicts_half(self):
        m = ElmanRNN.zeros(3, 25)
        pred, hs = rnn_forward(m, np.random.default_rng(0).normal(size=(7, 3)))
        assert pred == 0.5
        assert np.all(hs == 0.5)

    def test_single_unit_hand_trace(self):
        # h stays at f(0) = 0.5 whatever the input; output f(1 * 0.5)
        m = ElmanRNN(W1=[[0.0]], W2=[[0.0]], W3=[[1.0]], B1=[0.0], B2=[0.0])
        pred, _ = rnn_forward(m, np.array([[3.0], [-2.0]]))
        assert pred == pytest.approx(0.62245933, abs=1e-8)

    def test_two_step_hand_trace(self):
        m = ElmanRNN(W1=[[1.0]], W2=[[2.0]], W3=[[1.0]], B1=[0.0], B2=[-1.0])
        h1 = sig(0.5)
        h2 = sig(-0.5 + 2 * h1)
        pred, hs = rnn_forward(m, np.array([[0.5], [-0.5]]))
        np.testing.assert_allclose(hs[:, 0], [h1, h2], rtol=1e-14)
        assert pred == pytest.approx(sig(h2 - 1), rel=1e-14)

    def test_order_matters(self):
        m = ElmanRNN.initialize(2, 25, 0.5, seed=1)
        x = np.random.default_rng(2).normal(size=(5, 2))
        assert rnn_forward(m, x)[0] != rnn_forward(m, x[::-1])[0]

    def test_hidden_states_in_unit_interval(self):
        m = ElmanRNN.initialize(3, 25, 0.5, seed=4)
        _, hs = rnn_forward(m, np.random.default_rng(5).normal(size=(15, 3)) * 10)
        assert np.all((hs > 0) & (hs < 1))

    def test_matches_independent_loss(self):
        m = ElmanRNN.initialize(3, 25, 0.5, seed=6)
        x = np.random.default_rng(7).normal(size=(8, 3))
        loss, _ = rnn_backward(m, x, 0.3)
        assert loss == pytest.approx(elman_loss(m.params(), x, 0.3), rel=1e-13)

    def test_dimension_mismatch(self):
        m = ElmanRNN.zeros(3, 4)
        with pytest.raises(DimensionMismatch):
            rnn_forward(m, np.zeros((5, 2)))
        with pytest.raises(DimensionMismatch):
            rnn_forward(m, np.zeros(3))

    def test_inconsistent_shapes(self):
        with pytest.raises(DimensionMismatch):
            ElmanRNN(np.zeros((2, 3)), np.zeros((4, 4)), np.zeros((4, 1)), np.zeros(4), np.zeros(1))


class TestBackward:
    def test_zero_residual_zero_gradient(self):
        m = ElmanRNN.initialize(3, 25, 0.5, seed=0)
        x = np.random.default_rng(1).normal(size=(6, 3))
        pred, _ = rnn_forward(m, x)
        loss, g = rnn_backward(m, x, pred)
        assert loss == 0.0
        assert all(not v.any() for v in g.values())

    def test_single_step_chain_rule(self):
        m = ElmanRNN(W1=[[0.3]], W2=[[0.7]], W3=[[-1.2]], B1=[0.1], B2=[0.2])
        x, y = 0.8, 0.9
        h = sig(0.3 * x + 0.1)
        p = sig(-1.2 * h + 0.2)
        d_out = (p - y) * p * (1 - p)
        da = d_out * -1.2 * h * (1 - h)
        _, g = rnn_backward(m, np.array([[x]]), y)
        assert g["W3"][0, 0] == pytest.approx(d_out * h, rel=1e-12)
        assert g["B2"][0] == pytest.approx(d_out, rel=1e-12)
        assert g["W1"][0, 0] == pytest.approx(da * x, rel=1e-12)
        assert g["B1"][0] == pytest.approx(da, rel=1e-12)
        # with one step the recurrent weight only meets the zero initial state
        assert g["W2"][0, 0] == 0.0

    @pytest.mark.parametrize("k", [3, 10, 15])
    def test_finite_difference(self, k):
        rng = np.random.default_rng(k)
        for trial in range(3):
            m = ElmanRNN.initialize(3, 25, 0.5, seed=int(rng.integers(1 << 30)))
            x = rng.normal(size=(k, 3))
            y = float(rng.uniform())
            _, g = rnn_backward(m, x, y)
            params = m.params()
            for name, p in params.items():
                num = central_difference(lambda: elman_loss(params, x, y), p, 1e-5)
                assert rel_error(g[name], num) < 1e-4, (name, trial)


class TestTraining:
    def test_zero_learning_rate_returns_init(self):
        s = random_samples(10, 4, 2)
        cfg = RnnTrainConfig(k=4, learning_rate=0.0, epochs=3, seed=9)
        m = rnn_train(s, cfg)
        ref = ElmanRNN.initialize(2, 25, 0.5, seed=9)
        for name in ref.params():
            np.testing.assert_array_equal(getattr(m, name), getattr(ref, name))

    def test_deterministic(self):
        s = random_samples(20, 5, 3)
        cfg = RnnTrainConfig(k=5, epochs=20, seed=3)
        a, b = rnn_train(s, cfg), rnn_train(s, cfg)
        for name in a.params():
            np.testing.assert_array_equal(getattr(a, name), getattr(b, name))

    def test_seed_changes_model(self):
        s = random_samples(20, 5, 3)
        a = rnn_train(s, RnnTrainConfig(k=5, epochs=5, seed=1))
        b = rnn_train(s, RnnTrainConfig(k=5, epochs=5, seed=2))
        assert not np.array_equal(a.W1, b.W1)

    def test_engines_agree(self):
        s = random_samples(30, 6, 3, seed=11)
        cfg = RnnTrainConfig(k=6, epochs=15, seed=4)
        a = rnn_train(s, cfg, engine="numba")
        b = rnn_train(s, cfg, engine="numpy")
        for name in a.params():
            np.testing.assert_allclose(getattr(a, name), getattr(b, name), rtol=0, atol=1e-10)

    def test_constant_target_converges(self):
        rng = np.random.default_rng(0)
        s = [WindowSample(rng.normal(size=(4, 1)), 0.5, 0) for _ in range(20)]
        m = rnn_train(s, RnnTrainConfig(k=4, epochs=200, seed=0))
        assert mse(m, s) < 1e-4

    def test_fits_learnable_target(self):
        # next-day target is the sign of the window sum
        rng = np.random.default_rng(1)
        s = []
        for _ in range(60):
            x = rng.normal(size=(3, 1))
            up = x.sum() > 0
            s.append(WindowSample(x, 0.8 if up else 0.2, int(up)))
        m = rnn_train(s, RnnTrainConfig(k=3, epochs=200, seed=0))
        acc = np.mean(predict_labels(m, s) == np.array([w.label for w in s]))
        assert acc > 0.9

    def test_all_zero_input_columns_never_update(self):
        s1 = random_samples(15, 4, 1, seed=5)
        s3 = [WindowSample(np.hstack([w.inputs, np.zeros((4, 2))]), w.target, w.label) for w in s1]
        m3 = rnn_train(s3, RnnTrainConfig(k=4, epochs=10, seed=0))
        init = ElmanRNN.initialize(3, 25, 0.5, 0)
        np.testing.assert_array_equal(m3.W1[1:], init.W1[1:])
        assert not np.array_equal(m3.W1[0], init.W1[0])

    def test_errors(self):
        with pytest.raises(EmptyDataset):
            rnn_train([], RnnTrainConfig())
        mixed = random_samples(2, 4, 2) + random_samples(1, 5, 2)
        with pytest.raises(DimensionMismatch):
            rnn_train(mixed, RnnTrainConfig(epochs=1))
        with pytest.raises(DimensionMismatch):
            rnn_train(random_samples(2, 4, 2), RnnTrainConfig(epochs=1), input_size=3)
        with pytest.raises(ValueError):
            rnn_train(random_samples(2, 4, 2), RnnTrainConfig(epochs=1), engine="gpu")

    def test_config_validation(self):
        for bad in ({"k": 0}, {"learning_rate": -1}, {"epochs": 0}, {"hidden_size": 0}):
            with pytest.raises(ValueError):
                RnnTrainConfig(**bad)


def test_checkpoint_round_trip():
    import json

    m = ElmanRNN.initialize(3, 7, 0.5, seed=8)
    d = json.loads(json.dumps(m.to_dict(seed=8, config=RnnTrainConfig(hidden_size=7))))
    assert d["H"] == 7 and d["d_in"] == 3 and d["seed"] == 8
    back = ElmanRNN.from_dict(d)
    for name in m.params():
        np.testing.assert_array_equal(getattr(m, name), getattr(back, name))
    d["H"] = 8
    with pytest.raises(DimensionMismatch):
        ElmanRNN.from_dict(d)
