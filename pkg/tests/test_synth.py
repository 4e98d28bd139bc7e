import numpy as np
import pytest

from sentivol.errors import InvalidSpec
from sentivol.synth import SynthSpec, generate_synthetic, weekdays, write_synthetic


def direction_agreement(data):
    return np.mean(np.sign(data.moves[1:]) == data.bullishness_sign[:-1])


def test_full_coupling_always_follows_sentiment():
    assert direction_agreement(generate_synthetic(SynthSpec(coupling=1.0, seed=3))) == 1.0


def test_half_coupling_is_a_coin_flip():
    agree = direction_agreement(generate_synthetic(SynthSpec(days=2000, coupling=0.5, seed=1)))
    assert abs(agree - 0.5) < 0.05


def test_default_coupling_rate():
    agree = direction_agreement(generate_synthetic(SynthSpec(days=2000, seed=2)))
    assert abs(agree - 0.9) < 0.03


def test_shape_and_calendar():
    d = generate_synthetic(SynthSpec(days=60, seed=0))
    assert len(d.prices) == 60
    assert all(day.weekday() < 5 for day in d.prices.dates)
    assert {p.date for p in d.posts} == set(d.prices.dates)
    assert np.all(d.prices.closes > 0)
    moved = np.abs(np.diff(d.prices.closes) / d.prices.closes[:-1])
    assert np.all((moved > 0.009) & (moved < 0.061))


def test_labeled_fraction():
    d = generate_synthetic(SynthSpec(days=100, seed=0, labeled_fraction=0.3))
    share = np.mean([p.label is not None for p in d.posts])
    assert abs(share - 0.3) < 0.03
    assert all(p.label is None for p in generate_synthetic(SynthSpec(days=50, labeled_fraction=0.0)).posts)


def test_same_seed_byte_identical(tmp_path):
    a = write_synthetic(SynthSpec(days=60, seed=5), tmp_path / "a")
    b = write_synthetic(SynthSpec(days=60, seed=5), tmp_path / "b")
    for x, y in zip(a, b):
        assert x.read_bytes() == y.read_bytes()
    c = write_synthetic(SynthSpec(days=60, seed=6), tmp_path / "c")
    assert c[0].read_bytes() != a[0].read_bytes()


@pytest.mark.parametrize("bad", [{"days": 10}, {"posts_per_day": 0}, {"coupling": 1.5},
                                 {"noise": -0.1}, {"volume_coupling": 2.0}, {"initial_price": 0.0},
                                 {"start": "not-a-date"}])
def test_invalid_spec(bad):
    with pytest.raises(InvalidSpec):
        generate_synthetic(SynthSpec(**bad))


def test_weekdays_skip_weekend():
    import datetime as dt

    days = weekdays(dt.date(2016, 1, 8), 3)  # Friday
    assert [d.isoformat() for d in days] == ["2016-01-08", "2016-01-11", "2016-01-12"]
