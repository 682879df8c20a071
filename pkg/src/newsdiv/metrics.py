"""The five normative diversity metrics over ranked recommendation lists.

Every metric is the divergence between two discrete distributions: the
recommendation's rank-discounted distribution against a metric-specific
context.

* calibration (topic / complexity): context = the user's reading history,
  discounted by recency.
* fragmentation: context = another user's recommendation, both sides
  discounted by rank, over story chains.
* activation / representation / alternative voices: context = the impression's
  candidate pool, never discounted (there is no ranking over the supply).

The rank cutoff applies to recommendation lists only; a reading history is
never truncated by it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .corpus import Article
from .distrib import (
    Binning,
    DiscreteDistribution,
    RankWeighting,
    build_distribution,
    history_distribution,
    smooth_pair,
)
from .divergence import KINDS, js, kl
from .errors import EmptyDistributionError
from .seeding import derive_rng

METRIC_NAMES = (
    "calibration_topic",
    "calibration_complexity",
    "fragmentation",
    "activation",
    "representation",
    "alternative_voices",
)

SUPPLY_WEIGHTING = RankWeighting("none", None)


@dataclass(frozen=True)
class MetricConfig:
    """Everything a metric needs beyond the articles themselves.

    A fixed seed makes the whole run deterministic, including fragmentation
    partner sampling.
    """

    divergence: str = "js"
    weighting: RankWeighting = RankWeighting("mrr", None)
    alpha: float = 0.001
    activation_bins: Binning = Binning("activation", 10, 0.0, 1.0)
    complexity_bins: Binning = Binning("complexity", 10, 0.0, 100.0)
    fragmentation_pairs: int = 5
    seed: int = 0

    def __post_init__(self) -> None:
        if self.divergence not in KINDS:
            raise ValueError(f"unknown divergence {self.divergence!r}")
        if self.fragmentation_pairs < 1:
            raise ValueError("fragmentation_pairs must be >= 1")


def subcategory_keys(article: Article) -> Mapping[str, float]:
    return {article.subcategory: 1.0} if article.subcategory else {}


def chain_keys(article: Article) -> Mapping[str, float]:
    return {article.chain_id: 1.0} if article.chain_id else {}


def actor_keys(article: Article) -> Mapping[str, float]:
    return {actor: 1.0 for actor in article.political_actors}


def voice_keys(article: Article) -> Mapping[str, float]:
    """Minority/majority masses proportional to mention counts."""
    keys = {}
    if article.minority_mentions:
        keys["minority"] = float(article.minority_mentions)
    if article.majority_mentions:
        keys["majority"] = float(article.majority_mentions)
    return keys


def binned_keys(binning: Binning):
    def key_fn(article: Article) -> Mapping[str, float]:
        value = getattr(article, binning.field)
        return {binning.key_for(value): 1.0} if value is not None else {}

    return key_fn


def pair_divergence(
    context: DiscreteDistribution,
    recommendation: DiscreteDistribution,
    config: MetricConfig,
    symmetrize_kl: bool = False,
) -> float:
    """Smooth the pair on its union domain, then diverge.

    KL runs context-first (how far the recommendation drifts from the
    context); ``symmetrize_kl`` averages the two KL directions instead,
    which fragmentation uses because neither user is the reference.
    """
    context_s, recommendation_s = smooth_pair(context, recommendation, config.alpha)
    if config.divergence == "js":
        return js(context_s, recommendation_s)
    if symmetrize_kl:
        return 0.5 * (kl(context_s, recommendation_s) + kl(recommendation_s, context_s))
    return kl(context_s, recommendation_s)


def calibration_topic(
    history: Sequence[Article],
    recommended: Sequence[Article],
    config: MetricConfig,
) -> float:
    """Divergence of recommended subcategories from the reading history's."""
    context = history_distribution(history, subcategory_keys, config.weighting.without_cutoff())
    recommendation = build_distribution(recommended, subcategory_keys, config.weighting)
    return pair_divergence(context, recommendation, config)


def calibration_complexity(
    history: Sequence[Article],
    recommended: Sequence[Article],
    config: MetricConfig,
) -> float:
    """Calibration over binned reading-ease scores instead of subcategories."""
    key_fn = binned_keys(config.complexity_bins)
    context = history_distribution(history, key_fn, config.weighting.without_cutoff())
    recommendation = build_distribution(recommended, key_fn, config.weighting)
    return pair_divergence(context, recommendation, config)


def fragmentation(
    recommended_u: Sequence[Article],
    recommended_v: Sequence[Article],
    config: MetricConfig,
) -> float:
    """Divergence between two users' recommended story-chain distributions.

    Symmetric for both divergence kinds: JS inherently, KL by averaging the
    two parameter orders.
    """
    distribution_u = build_distribution(recommended_u, chain_keys, config.weighting)
    distribution_v = build_distribution(recommended_v, chain_keys, config.weighting)
    return pair_divergence(distribution_u, distribution_v, config, symmetrize_kl=True)


def activation_divergence(
    candidates: Sequence[Article],
    recommended: Sequence[Article],
    config: MetricConfig,
) -> float:
    """Divergence of recommended activation bins from the candidate pool's."""
    key_fn = binned_keys(config.activation_bins)
    context = build_distribution(candidates, key_fn, SUPPLY_WEIGHTING)
    recommendation = build_distribution(recommended, key_fn, config.weighting)
    return pair_divergence(context, recommendation, config)


def representation(
    candidates: Sequence[Article],
    recommended: Sequence[Article],
    config: MetricConfig,
) -> float:
    """Divergence of recommended political-actor presence from the pool's.

    Articles mentioning several actors weigh in once per actor; articles
    mentioning none drop out entirely.
    """
    context = build_distribution(candidates, actor_keys, SUPPLY_WEIGHTING)
    recommendation = build_distribution(recommended, actor_keys, config.weighting)
    return pair_divergence(context, recommendation, config)


def alternative_voices(
    candidates: Sequence[Article],
    recommended: Sequence[Article],
    config: MetricConfig,
) -> float:
    """Divergence of the minority/majority voice share from the pool's."""
    context = build_distribution(candidates, voice_keys, SUPPLY_WEIGHTING)
    recommendation = build_distribution(recommended, voice_keys, config.weighting)
    return pair_divergence(context, recommendation, config)


def fragmentation_partners(ids: Sequence[str], pairs: int, seed: int) -> list[tuple[str, str]]:
    """Seeded partner draw: for every id, ``pairs`` distinct partners sampled
    uniformly without replacement (all of them when pairs >= population - 1).

    Deterministic for a fixed seed regardless of caller ordering.
    """
    if pairs < 1:
        raise ValueError("pairs must be >= 1")
    ordered = sorted(ids)
    if len(ordered) != len(set(ordered)):
        raise ValueError("ids must be unique")
    rng = derive_rng(seed, "fragmentation")
    drawn = []
    for current in ordered:
        others = [candidate for candidate in ordered if candidate != current]
        for partner in rng.sample(others, min(pairs, len(others))):
            drawn.append((current, partner))
    return drawn


@dataclass
class FragmentationSamples:
    samples: list[tuple[str, float]] = field(default_factory=list)
    skips: list[tuple[str, str]] = field(default_factory=list)


def sample_fragmentation(
    recommendations: Mapping[str, Sequence[Article]],
    config: MetricConfig,
) -> FragmentationSamples:
    """Fragmentation over seeded partner pairs of recommendation lists.

    ``recommendations`` maps a list id (impression id) to its ranked
    articles.  Fewer than two lists yields no samples, only a skip entry.
    Sample ids are "u|v" for the ordered draw (u, v).
    """
    result = FragmentationSamples()
    if len(recommendations) < 2:
        result.skips.append(("", "fewer than 2 recommendation lists"))
        return result
    for current, partner in fragmentation_partners(
        list(recommendations), config.fragmentation_pairs, config.seed
    ):
        pair_id = f"{current}|{partner}"
        try:
            value = fragmentation(recommendations[current], recommendations[partner], config)
        except EmptyDistributionError as exc:
            result.skips.append((pair_id, str(exc)))
            continue
        result.samples.append((pair_id, value))
    return result


@dataclass(frozen=True)
class Aggregate:
    """Mean with a normal-approximation 95% confidence interval."""

    n: int
    mean: float
    std: float
    ci95: float


def aggregate(samples: Sequence[float]) -> Aggregate:
    """Mean, sample standard deviation (n - 1, zero for a single sample) and
    the 1.96 std / sqrt(n) interval half-width."""
    n = len(samples)
    if n == 0:
        raise ValueError("cannot aggregate zero samples")
    mean = math.fsum(samples) / n
    if n == 1:
        std = 0.0
    else:
        std = math.sqrt(math.fsum((value - mean) ** 2 for value in samples) / (n - 1))
    return Aggregate(n=n, mean=mean, std=std, ci95=1.96 * std / math.sqrt(n))
