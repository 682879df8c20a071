"""Command-line interface.

Subcommands: ``enrich`` (compute article metadata), ``recommend`` (baseline
ranking files), ``evaluate`` (score one divergence/weighting setup) and
``sensitivity`` (sweep divergence x weighting x cutoffs).  Exit codes: 0 on
success, 1 on input errors, 2 on internal errors.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import corpus as corpus_io
from .config import RunConfig, load_config_file
from .enrich import dump_enriched, enrich_corpus, load_gazetteer, load_lexicon, load_sidecar
from .errors import InputError
from .evaluate import build_grid, evaluate_recommendations
from .recommenders import click_counts, recommend_popular, recommend_random
from .report import aggregate_rows, write_report, write_samples_csv, write_skips

_OPTION_KEYS = (
    "news",
    "bodies",
    "behaviors",
    "lexicon",
    "gazetteer",
    "sidecar",
    "out",
    "recommenders",
    "divergence",
    "weighting",
    "divergences",
    "weightings",
    "cutoffs",
    "alpha",
    "bins",
    "activation_bins",
    "complexity_bins",
    "pairs",
    "seed",
    "pool",
    "workers",
    "tau",
    "window_days",
)


def _add_common_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="key=value config file; flags override it")
    parser.add_argument("--news", help="news catalog TSV")
    parser.add_argument("--bodies", help="article bodies JSON-lines")
    parser.add_argument("--behaviors", help="impression log TSV")
    parser.add_argument("--lexicon", help="sentiment lexicon TSV")
    parser.add_argument("--gazetteer", help="entity gazetteer JSON-lines")
    parser.add_argument("--sidecar", help="enrichment override JSON-lines")
    parser.add_argument("--seed", help="master seed (default 0)")
    parser.add_argument("--tau", help="story-chain cosine threshold (default 0.5)")
    parser.add_argument("--window-days", dest="window_days", help="story-chain window (default 3)")


def _add_metric_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--divergence", choices=["kl", "js"], help="divergence (default js)")
    parser.add_argument(
        "--weighting", choices=["none", "mrr", "ndcg"], help="rank discount (default mrr)"
    )
    parser.add_argument("--cutoffs", help="comma list of rank cutoffs; 0 means @N (default 0)")
    parser.add_argument("--alpha", help="smoothing fraction (default 0.001)")
    parser.add_argument("--bins", help="bin count for activation and complexity (default 10)")
    parser.add_argument("--pairs", help="fragmentation partner draws per list (default 5)")
    parser.add_argument("--recommenders", help="comma list from random,popular (default both)")
    parser.add_argument(
        "--external",
        action="append",
        dest="externals",
        metavar="NAME=PATH",
        help="external recommendations JSON-lines; repeatable",
    )
    parser.add_argument("--pool", choices=["impression", "daily"], help="supply context")
    parser.add_argument("--workers", help="worker threads for per-impression metrics")
    parser.add_argument("--out", help="output directory (default out)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="newsdiv",
        description="Score ranked news-recommendation logs on normative diversity metrics.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    enrich = subparsers.add_parser("enrich", help="compute per-article metadata")
    _add_common_options(enrich)
    enrich.add_argument("-o", "--output", required=True, help="enriched catalog JSON-lines")
    enrich.set_defaults(handler=_cmd_enrich)

    recommend = subparsers.add_parser("recommend", help="write a baseline recommendation file")
    _add_common_options(recommend)
    recommend.add_argument("--strategy", choices=["random", "popular"], required=True)
    recommend.add_argument("-o", "--output", required=True, help="recommendations JSON-lines")
    recommend.set_defaults(handler=_cmd_recommend)

    evaluate = subparsers.add_parser("evaluate", help="score recommenders on all metrics")
    _add_common_options(evaluate)
    _add_metric_options(evaluate)
    evaluate.set_defaults(handler=_cmd_evaluate)

    sensitivity = subparsers.add_parser(
        "sensitivity", help="sweep divergence, rank-awareness and cutoffs"
    )
    _add_common_options(sensitivity)
    _add_metric_options(sensitivity)
    sensitivity.add_argument("--divergences", help="comma list to sweep (default kl,js)")
    sensitivity.add_argument("--weightings", help="comma list to sweep (default none,mrr)")
    sensitivity.set_defaults(handler=_cmd_sensitivity)

    return parser


def _resolve_config(args: argparse.Namespace) -> RunConfig:
    options: dict[str, object] = {}
    if getattr(args, "config", None):
        options.update(load_config_file(args.config))
    for key in _OPTION_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            options[key] = value
    externals = getattr(args, "externals", None)
    if externals:
        options["externals"] = externals
    return RunConfig.from_options(options)


def _require(config: RunConfig, *names: str) -> None:
    for name in names:
        path = getattr(config, name)
        if path is None:
            raise InputError(f"--{name} is required for this command")
        if not Path(path).exists():
            raise InputError(f"{name} file not found: {path}")
    for optional in ("bodies", "lexicon", "gazetteer", "sidecar"):
        path = getattr(config, optional)
        if path is not None and not Path(path).exists():
            raise InputError(f"{optional} file not found: {path}")


def _load_corpus(config: RunConfig, impressions=None) -> corpus_io.Corpus:
    corpus = corpus_io.load_catalog(config.news, config.bodies)
    lexicon = load_lexicon(config.lexicon) if config.lexicon else None
    gazetteer = load_gazetteer(config.gazetteer) if config.gazetteer else None
    enrich_corpus(
        corpus,
        lexicon=lexicon,
        gazetteer=gazetteer,
        tau=config.tau,
        window_seconds=config.window_days * 86400.0,
        impressions=impressions,
    )
    if config.sidecar:
        load_sidecar(config.sidecar, corpus)
    return corpus


def _cmd_enrich(args: argparse.Namespace) -> int:
    config = _resolve_config(args)
    _require(config, "news")
    impressions = None
    if config.behaviors:
        if not Path(config.behaviors).exists():
            raise InputError(f"behaviors file not found: {config.behaviors}")
        impressions = corpus_io.load_behaviors(config.behaviors)
    corpus = _load_corpus(config, impressions)
    dump_enriched(corpus, args.output)
    print(f"enriched {len(corpus)} articles -> {args.output} ({len(corpus.warnings)} warnings)")
    for warning in corpus.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    return 0


def _cmd_recommend(args: argparse.Namespace) -> int:
    config = _resolve_config(args)
    _require(config, "behaviors")
    impressions = corpus_io.load_behaviors(config.behaviors)
    if args.strategy == "random":
        recommendations = [recommend_random(impression, config.seed) for impression in impressions]
    else:
        counts = click_counts(impressions)
        recommendations = [recommend_popular(impression, counts) for impression in impressions]
    corpus_io.dump_recommendations(recommendations, args.output)
    print(f"wrote {len(recommendations)} {args.strategy} recommendations -> {args.output}")
    return 0


def _gather_recommendations(config: RunConfig, impressions):
    by_source = {}
    for recommender in config.recommenders:
        if recommender == "random":
            by_source["random"] = [
                recommend_random(impression, config.seed) for impression in impressions
            ]
        else:
            counts = click_counts(impressions)
            by_source["popular"] = [
                recommend_popular(impression, counts) for impression in impressions
            ]
    for name, path in sorted(config.externals.items()):
        if not Path(path).exists():
            raise InputError(f"external recommendations file not found: {path}")
        by_source[f"external:{name}"] = corpus_io.load_recommendations(
            path, impressions, source=f"external:{name}"
        )
    return by_source


def _run_evaluation(config: RunConfig, grid) -> int:
    _require(config, "news", "behaviors")
    impressions = corpus_io.load_behaviors(config.behaviors)
    corpus = _load_corpus(config, impressions)
    missing = corpus_io.missing_article_ids(impressions, corpus)
    if missing:
        raise InputError(
            f"behaviors reference {len(missing)} article id(s) missing from the catalog: "
            + ", ".join(missing[:10])
        )
    recommendations = _gather_recommendations(config, impressions)
    result = evaluate_recommendations(
        corpus,
        impressions,
        recommendations,
        config.metric_config(),
        grid,
        pool=config.pool,
        workers=config.workers,
    )
    out_dir = Path(config.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = aggregate_rows(result.samples, result.skips)
    write_report(rows, out_dir / "report.json", config.echo())
    write_samples_csv(result.samples, out_dir / "samples.csv")
    write_skips(result.skips, out_dir / "skips.json")
    print(
        f"wrote {out_dir / 'report.json'} ({len(rows)} rows), "
        f"{out_dir / 'samples.csv'} ({len(result.samples)} samples), "
        f"{out_dir / 'skips.json'} ({len(result.skips)} skips)"
    )
    return 0


def _cmd_evaluate(args: argparse.Namespace) -> int:
    config = _resolve_config(args)
    grid = build_grid([config.divergence], [config.weighting], config.cutoffs)
    return _run_evaluation(config, grid)


def _cmd_sensitivity(args: argparse.Namespace) -> int:
    config = _resolve_config(args)
    grid = build_grid(config.divergences, config.weightings, config.cutoffs)
    return _run_evaluation(config, grid)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # internal failure, distinct exit code
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
