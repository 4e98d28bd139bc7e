import datetime as dt

import pytest

from sentivol import pipeline
from sentivol.config import PipelineConfig
from sentivol.corpus import Post
from sentivol.synth import SynthSpec, write_synthetic

D0 = dt.date(2016, 3, 1)


def make_post(tokens, label=None, date=D0, pid="p", stock="000573"):
    return Post(pid, stock, date, tuple(tokens), label)


@pytest.fixture(scope="session")
def synthetic_run(tmp_path_factory):
    """Default synthetic corpus (seed 0) taken through prepare-market."""
    root = tmp_path_factory.mktemp("synthetic")
    posts, prices = write_synthetic(SynthSpec(seed=0), root)
    cfg = PipelineConfig(posts=str(posts), prices=str(prices), output_dir=str(root / "out"))
    for step in ("train-sentiment", "score-posts", "build-indicators", "prepare-market"):
        pipeline.STEPS[step](cfg)
    return cfg


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
