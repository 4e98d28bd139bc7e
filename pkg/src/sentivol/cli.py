"""Command-line entry point: ``sentivol <subcommand> [options]``.

Exit codes: 0 success, 1 data error, 2 configuration error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys

from . import pipeline
from .config import PipelineConfig
from .errors import ConfigError, DataError
from .evaluation import METHOD_LABELS
from .synth import SynthSpec, write_synthetic

log = logging.getLogger("sentivol")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("-c", "--config", help="JSON config file (flat key/value object)")
    p.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                   help="override a config key; repeatable")
    p.add_argument("--posts", help="posts JSONL file")
    p.add_argument("--prices", help="prices CSV file")
    p.add_argument("-o", "--out", dest="output_dir", help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sentivol", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    steps = {
        "train-sentiment": "learn the term-weight dictionary from labeled posts",
        "score-posts": "score every post with the learned dictionary",
        "build-indicators": "daily bullishness / volume indicators and their z-scores",
        "prepare-market": "volatility, normalisation, direction labels, join with indicators",
        "train-predict": "train each method once at k and score the test days",
        "sweep": "k sweep with replicated trainings per method",
        "run": "every step above, then the comparison report",
    }
    for name, help_ in steps.items():
        _common(sub.add_parser(name, help=help_))

    rep = sub.add_parser("report", help="cross-stock MEAN/STD table from results CSVs")
    _common(rep)
    rep.add_argument("results", nargs="*", help="results.csv files (default: OUT/results.csv)")

    syn = sub.add_parser("synth", help="write a seeded synthetic posts/prices pair")
    syn.add_argument("-o", "--out", required=True)
    defaults = SynthSpec()
    syn.add_argument("--days", type=int, default=defaults.days)
    syn.add_argument("--posts-per-day", type=int, default=defaults.posts_per_day)
    syn.add_argument("--coupling", type=float, default=defaults.coupling)
    syn.add_argument("--noise", type=float, default=defaults.noise)
    syn.add_argument("--volume-coupling", type=float, default=defaults.volume_coupling)
    syn.add_argument("--labeled-fraction", type=float, default=defaults.labeled_fraction)
    syn.add_argument("--stock", default=defaults.stock_id)
    syn.add_argument("--seed", type=int, default=defaults.seed)
    return parser


def resolve_config(args) -> PipelineConfig:
    cfg = PipelineConfig.load(args.config) if args.config else PipelineConfig()
    flags = {k: getattr(args, k) for k in ("posts", "prices", "output_dir") if getattr(args, k, None)}
    return cfg.updated(flags).with_overrides(args.overrides)


def _print(obj) -> None:
    print(json.dumps(obj, indent=2, sort_keys=True, default=str))


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "synth":
            spec = SynthSpec(days=args.days, posts_per_day=args.posts_per_day, coupling=args.coupling,
                             noise=args.noise, seed=args.seed, volume_coupling=args.volume_coupling,
                             labeled_fraction=args.labeled_fraction, stock_id=args.stock)
            posts, prices = write_synthetic(spec, args.out)
            _print({"posts": str(posts), "prices": str(prices)})
            return 0
        cfg = resolve_config(args)
        if args.command == "report":
            summary = pipeline.report(cfg, args.results)
            print(f"{'method':<8} {'MEAN':>9} {'STD':>9} stocks")
            for s in summary:
                print(f"{METHOD_LABELS[s.method]:<8} {s.mean:9.6f} {s.std:9.6f} {s.n_stocks}")
            return 0
        if args.command == "run":
            _print(pipeline.run_all(cfg))
            return 0
        _print(pipeline.STEPS[args.command](cfg))
        return 0
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except DataError as e:
        print(f"data error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
