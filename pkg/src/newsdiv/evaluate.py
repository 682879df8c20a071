"""Evaluation driver: per-impression metric samples across a configuration
grid, with skips recorded instead of silently biasing the means."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Iterable, Mapping, Sequence

from .corpus import Article, Corpus, ImpressionLog, RecommendationList
from .distrib import RankWeighting
from .errors import EmptyDistributionError, ValidationError
from .metrics import (
    MetricConfig,
    activation_divergence,
    alternative_voices,
    calibration_complexity,
    calibration_topic,
    representation,
    sample_fragmentation,
)

POOLS = ("impression", "daily")


@dataclass(frozen=True)
class GridPoint:
    divergence: str
    weighting: str
    cutoff: int  # 0 encodes "no cutoff" (@N)

    def rank_weighting(self) -> RankWeighting:
        return RankWeighting(self.weighting, self.cutoff if self.cutoff > 0 else None)


@dataclass(frozen=True)
class SampleRow:
    metric: str
    recommender: str
    divergence: str
    weighting: str
    cutoff: int
    pair_id: str
    value: float


@dataclass(frozen=True)
class SkipRow:
    metric: str
    recommender: str
    divergence: str
    weighting: str
    cutoff: int
    pair_id: str
    reason: str


@dataclass
class EvaluationResult:
    samples: list[SampleRow]
    skips: list[SkipRow]


def build_grid(
    divergences: Sequence[str],
    weightings: Sequence[str],
    cutoffs: Sequence[int],
) -> list[GridPoint]:
    if not cutoffs:
        raise ValueError("cutoffs list must be non-empty")
    return [
        GridPoint(divergence, weighting, cutoff)
        for divergence in divergences
        for weighting in weightings
        for cutoff in cutoffs
    ]


def daily_pools(impressions: Sequence[ImpressionLog]) -> dict[str, tuple[str, ...]]:
    """Candidate-id union per UTC day, for the global-pool context switch."""
    pools: dict[str, set[str]] = {}
    for impression in impressions:
        day = datetime.fromtimestamp(impression.time, tz=timezone.utc).strftime("%Y-%m-%d")
        pools.setdefault(day, set()).update(impression.candidate_ids)
    return {day: tuple(sorted(ids)) for day, ids in pools.items()}


def _impression_day(impression: ImpressionLog) -> str:
    return datetime.fromtimestamp(impression.time, tz=timezone.utc).strftime("%Y-%m-%d")


_PER_IMPRESSION = (
    ("calibration_topic", calibration_topic, "history"),
    ("calibration_complexity", calibration_complexity, "history"),
    ("activation", activation_divergence, "pool"),
    ("representation", representation, "pool"),
    ("alternative_voices", alternative_voices, "pool"),
)


def evaluate_recommendations(
    corpus: Corpus,
    impressions: Sequence[ImpressionLog],
    recommendations_by_source: Mapping[str, Sequence[RecommendationList]],
    metric_config: MetricConfig,
    grid: Sequence[GridPoint],
    pool: str = "impression",
    workers: int = 1,
) -> EvaluationResult:
    """Compute every metric sample for every recommender and grid point.

    Rows come back sorted on (metric, recommender, divergence, weighting,
    cutoff, pair id), so worker count and scheduling never change the output.
    Fragmentation partners are drawn once per recommender from the seed and
    reused across the grid, keeping grid points comparable.
    """
    if pool not in POOLS:
        raise ValueError(f"unknown pool {pool!r}")
    by_impression = {impression.impression_id: impression for impression in impressions}
    day_pools = daily_pools(impressions) if pool == "daily" else {}
    grid_configs = [(point, _point_config(metric_config, point)) for point in grid]

    samples: list[SampleRow] = []
    skips: list[SkipRow] = []
    for source in sorted(recommendations_by_source):
        recommendations = recommendations_by_source[source]
        joined = []
        for recommendation in recommendations:
            impression = by_impression.get(recommendation.impression_id)
            if impression is None:
                raise ValidationError(
                    f"recommendation references unknown impression {recommendation.impression_id!r}"
                )
            joined.append((impression, recommendation))

        def evaluate_one(
            task: tuple[ImpressionLog, RecommendationList],
            source: str = source,
        ) -> tuple[list[SampleRow], list[SkipRow]]:
            impression, recommendation = task
            return _evaluate_impression(
                corpus, impression, recommendation, source, grid_configs, day_pools
            )

        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as executor:
                outcomes = list(executor.map(evaluate_one, joined))
        else:
            outcomes = [evaluate_one(task) for task in joined]
        for sample_rows, skip_rows in outcomes:
            samples.extend(sample_rows)
            skips.extend(skip_rows)

        ranked_articles = {
            recommendation.impression_id: _resolve(corpus, recommendation.ranked_items)
            for recommendation in recommendations
        }
        for point, config in grid_configs:
            outcome = sample_fragmentation(ranked_articles, config)
            for pair_id, value in outcome.samples:
                samples.append(
                    SampleRow("fragmentation", source, point.divergence, point.weighting, point.cutoff, pair_id, value)
                )
            for pair_id, reason in outcome.skips:
                skips.append(
                    SkipRow("fragmentation", source, point.divergence, point.weighting, point.cutoff, pair_id, reason)
                )

    samples.sort(key=_row_key)
    skips.sort(key=lambda row: _row_key(row) + (row.reason,))
    return EvaluationResult(samples=samples, skips=skips)


def _row_key(row) -> tuple:
    return (row.metric, row.recommender, row.divergence, row.weighting, row.cutoff, row.pair_id)


def _point_config(base: MetricConfig, point: GridPoint) -> MetricConfig:
    return MetricConfig(
        divergence=point.divergence,
        weighting=point.rank_weighting(),
        alpha=base.alpha,
        activation_bins=base.activation_bins,
        complexity_bins=base.complexity_bins,
        fragmentation_pairs=base.fragmentation_pairs,
        seed=base.seed,
    )


def _resolve(corpus: Corpus, ids: Iterable[str]) -> list[Article]:
    return [corpus[article_id] for article_id in ids]


def _evaluate_impression(
    corpus: Corpus,
    impression: ImpressionLog,
    recommendation: RecommendationList,
    source: str,
    grid_configs: Sequence[tuple[GridPoint, MetricConfig]],
    day_pools: Mapping[str, tuple[str, ...]],
) -> tuple[list[SampleRow], list[SkipRow]]:
    history = _resolve(corpus, impression.history)
    recommended = _resolve(corpus, recommendation.ranked_items)
    if day_pools:
        candidates = _resolve(corpus, day_pools[_impression_day(impression)])
    else:
        candidates = _resolve(corpus, impression.candidate_ids)

    samples = []
    skips = []
    for point, config in grid_configs:
        for metric_name, metric_fn, context_kind in _PER_IMPRESSION:
            context = history if context_kind == "history" else candidates
            try:
                value = metric_fn(context, recommended, config)
            except EmptyDistributionError as exc:
                skips.append(
                    SkipRow(
                        metric_name,
                        source,
                        point.divergence,
                        point.weighting,
                        point.cutoff,
                        impression.impression_id,
                        str(exc),
                    )
                )
                continue
            samples.append(
                SampleRow(
                    metric_name,
                    source,
                    point.divergence,
                    point.weighting,
                    point.cutoff,
                    impression.impression_id,
                    value,
                )
            )
    return samples, skips
