"""Per-article metadata: reading ease, sentiment activation, story chains and
entity-derived fields.

Everything here is deterministic and model-free: a closed-form readability
formula, a polarity lexicon, TF-IDF cosine chaining and gazetteer alias
matching.  A sidecar file can override any computed field with the output of
a stronger external pipeline.
"""
from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .corpus import Article, Corpus, ImpressionLog
from .errors import ParseError

_TOKEN_RE = re.compile(r"[a-z0-9]+")
_SENTENCE_RE = re.compile(r"[.!?]+")
_VOWEL_RUN_RE = re.compile(r"[aeiouy]+")

DEFAULT_TAU = 0.5
DEFAULT_WINDOW_SECONDS = 3 * 86400.0


def tokenize(text: str) -> list[str]:
    return _TOKEN_RE.findall(text.lower())


def count_syllables(word: str) -> int:
    """Vowel-group heuristic: maximal aeiouy runs, one dropped for a silent
    trailing 'e', never below one per word."""
    if not word:
        return 0
    letters = re.sub(r"[^a-z]", "", word.lower())
    runs = len(_VOWEL_RUN_RE.findall(letters))
    if letters.endswith("e"):
        runs -= 1
    return max(runs, 1)


def complexity(text: str) -> float | None:
    """Reading-ease score 206.835 - 1.015 (words/sentences)
    - 84.6 (syllables/words), clamped to [0, 100].

    Sentences split on runs of ``.!?``; words on whitespace; syllables via
    :func:`count_syllables`.  Empty text yields None, not zero.
    """
    if not text.strip():
        return None
    words = text.split()
    sentences = sum(1 for part in _SENTENCE_RE.split(text) if part.strip()) or 1
    syllables = sum(count_syllables(word) for word in words)
    score = 206.835 - 1.015 * (len(words) / sentences) - 84.6 * (syllables / len(words))
    return min(max(score, 0.0), 100.0)


def load_lexicon(path: str | Path) -> dict[str, float]:
    """Polarity lexicon TSV ``token <tab> polarity`` with polarity in [-1, 1]."""
    path = Path(path)
    lexicon: dict[str, float] = {}
    with open(path, encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ParseError(f"{path}:{lineno}: expected 'token<TAB>polarity'")
            token, polarity_text = parts
            try:
                polarity = float(polarity_text)
            except ValueError:
                raise ParseError(f"{path}:{lineno}: invalid polarity {polarity_text!r}") from None
            if not -1.0 <= polarity <= 1.0:
                raise ParseError(f"{path}:{lineno}: polarity {polarity} outside [-1, 1]")
            lexicon[token.lower()] = polarity
    return lexicon


def activation(text: str, lexicon: Mapping[str, float]) -> float:
    """Absolute mean polarity of the lexicon-matched tokens, in [0, 1].

    Every token occurrence counts; text without a single match scores 0.
    """
    matched = [lexicon[token] for token in tokenize(text) if token in lexicon]
    if not matched:
        return 0.0
    return abs(math.fsum(matched) / len(matched))


@dataclass(frozen=True)
class GazetteerEntry:
    canonical_id: str
    kind: str  # "person" | "party"
    aliases: tuple[str, ...]
    is_political: bool
    in_knowledge_base: bool


class Gazetteer:
    """Alias table for entity tagging; aliases are matched case-insensitively
    on word boundaries, every occurrence counting as one mention."""

    def __init__(self, entries: Sequence[GazetteerEntry]):
        seen = set()
        for entry in entries:
            if entry.canonical_id in seen:
                raise ParseError(f"duplicate gazetteer id {entry.canonical_id!r}")
            seen.add(entry.canonical_id)
        self.entries = tuple(entries)
        self._patterns = {
            entry.canonical_id: [
                re.compile(r"\b" + re.escape(alias) + r"\b") for alias in entry.aliases
            ]
            for entry in entries
        }

    def mention_counts(self, text: str) -> dict[str, int]:
        """Mentions per canonical id; ids without a match are omitted."""
        lowered = text.lower()
        counts = {}
        for entry in self.entries:
            mentions = sum(
                len(pattern.findall(lowered)) for pattern in self._patterns[entry.canonical_id]
            )
            if mentions:
                counts[entry.canonical_id] = mentions
        return counts


def load_gazetteer(path: str | Path) -> Gazetteer:
    """Gazetteer JSON lines: ``{"canonical_id", "kind", "aliases",
    "is_political", "in_knowledge_base"}``."""
    path = Path(path)
    entries = []
    with open(path, encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"{path}:{lineno}: invalid JSON ({exc})") from None
            kind = record.get("kind")
            if kind not in ("person", "party"):
                raise ParseError(f"{path}:{lineno}: kind must be 'person' or 'party', got {kind!r}")
            aliases = [str(alias).lower() for alias in record.get("aliases", [])]
            if not aliases or any(not alias for alias in aliases):
                raise ParseError(f"{path}:{lineno}: aliases must be non-empty")
            entries.append(
                GazetteerEntry(
                    canonical_id=str(record["canonical_id"]),
                    kind=kind,
                    aliases=tuple(aliases),
                    is_political=bool(record.get("is_political", False)),
                    in_knowledge_base=bool(record.get("in_knowledge_base", False)),
                )
            )
    try:
        return Gazetteer(entries)
    except ParseError as exc:
        raise ParseError(f"{path}: {exc}") from None


def tag_entities(text: str, gazetteer: Gazetteer) -> tuple[frozenset[str], int, int]:
    """(political actor ids, minority mentions, majority mentions) for a text.

    Actors are the matched entries flagged political, as a set.  Matched
    person entries count their mentions toward the majority tally when they
    are in the knowledge base, toward the minority tally otherwise.
    """
    counts = gazetteer.mention_counts(text)
    actors = set()
    minority = 0
    majority = 0
    for entry in gazetteer.entries:
        mentions = counts.get(entry.canonical_id, 0)
        if not mentions:
            continue
        if entry.is_political:
            actors.add(entry.canonical_id)
        if entry.kind == "person":
            if entry.in_knowledge_base:
                majority += mentions
            else:
                minority += mentions
    return frozenset(actors), minority, majority


def _tf_idf_vector(tokens: Sequence[str], idf: Mapping[str, float]) -> dict[str, float]:
    counts: dict[str, int] = {}
    for token in tokens:
        counts[token] = counts.get(token, 0) + 1
    vector = {token: count * idf[token] for token, count in counts.items() if token in idf}
    norm = math.sqrt(math.fsum(value * value for value in vector.values()))
    if norm == 0.0:
        return {}
    return {token: value / norm for token, value in vector.items()}


def _cosine(a: Mapping[str, float], b: Mapping[str, float]) -> float:
    if len(b) < len(a):
        a, b = b, a
    return math.fsum(value * b[token] for token, value in a.items() if token in b)


class _Chain:
    __slots__ = ("chain_id", "vector_sum", "last_seen")

    def __init__(self, chain_id: str, vector: Mapping[str, float], last_seen: float):
        self.chain_id = chain_id
        self.vector_sum = dict(vector)
        self.last_seen = last_seen

    def centroid(self) -> dict[str, float]:
        norm = math.sqrt(math.fsum(value * value for value in self.vector_sum.values()))
        if norm == 0.0:
            return {}
        return {token: value / norm for token, value in self.vector_sum.items()}

    def absorb(self, vector: Mapping[str, float], seen: float) -> None:
        for token, value in vector.items():
            self.vector_sum[token] = self.vector_sum.get(token, 0.0) + value
        self.last_seen = max(self.last_seen, seen)


def chain_articles(
    articles: Sequence[Article],
    tau: float = DEFAULT_TAU,
    window_seconds: float = DEFAULT_WINDOW_SECONDS,
) -> dict[str, str]:
    """Greedy single-pass story chaining over time-ordered articles.

    Each article joins the chain with the highest centroid cosine, provided
    the cosine reaches ``tau`` and the chain was last extended within the
    moving window (default three days); otherwise it opens a new chain.
    TF-IDF vectors use smoothed IDF over the full list passed in, so the
    caller should pass the whole catalog, sorted by timestamp ascending.
    Returns article id -> chain id.
    """
    if not 0.0 < tau <= 1.0:
        raise ValueError(f"tau must be in (0, 1], got {tau}")
    document_tokens = {article.id: tokenize(article.text()) for article in articles}
    frequency: dict[str, int] = {}
    for tokens in document_tokens.values():
        for token in set(tokens):
            frequency[token] = frequency.get(token, 0) + 1
    total = len(articles)
    idf = {token: math.log((1 + total) / (1 + df)) + 1.0 for token, df in frequency.items()}

    chains: list[_Chain] = []
    assignment: dict[str, str] = {}
    for article in articles:
        vector = _tf_idf_vector(document_tokens[article.id], idf)
        when = article.published_at if article.published_at is not None else 0.0
        best: _Chain | None = None
        best_score = 0.0
        for chain in chains:
            if when - chain.last_seen > window_seconds:
                continue
            score = _cosine(vector, chain.centroid())
            if score > best_score:
                best, best_score = chain, score
        if best is not None and best_score >= tau:
            best.absorb(vector, when)
            assignment[article.id] = best.chain_id
        else:
            chain = _Chain(f"chain_{len(chains) + 1:06d}", vector, when)
            chains.append(chain)
            assignment[article.id] = chain.chain_id
    return assignment


def assign_missing_timestamps(corpus: Corpus, impressions: Iterable[ImpressionLog]) -> Corpus:
    """Give articles without a publication time the time of their earliest
    impression appearance, so story chaining can place them."""
    earliest: dict[str, float] = {}
    for impression in impressions:
        for article_id in impression.candidate_ids + impression.history:
            seen = earliest.get(article_id)
            if seen is None or impression.time < seen:
                earliest[article_id] = impression.time
    for article in list(corpus):
        if article.published_at is None and article.id in earliest:
            corpus.update(replace(article, published_at=earliest[article.id]))
    return corpus


def enrich_corpus(
    corpus: Corpus,
    lexicon: Mapping[str, float] | None = None,
    gazetteer: Gazetteer | None = None,
    tau: float = DEFAULT_TAU,
    window_seconds: float = DEFAULT_WINDOW_SECONDS,
    impressions: Iterable[ImpressionLog] | None = None,
) -> Corpus:
    """Fill the computed enrichment fields of every article in place.

    Articles with empty text keep complexity and activation absent.  Without
    a lexicon, activation stays absent; without a gazetteer, entity fields
    stay at their empty defaults.  Articles that end up without any
    timestamp cannot be chained and are counted as warnings.
    """
    if impressions is not None:
        assign_missing_timestamps(corpus, impressions)

    dated = [article for article in corpus if article.published_at is not None]
    dated.sort(key=lambda article: article.published_at)
    chain_of = chain_articles(dated, tau=tau, window_seconds=window_seconds)
    undated = len(corpus) - len(dated)
    if undated:
        corpus.warn(f"{undated} article(s) lack a timestamp and were not chained")

    for article in list(corpus):
        text = article.text()
        fields: dict[str, object] = {
            "complexity": complexity(text),
            "chain_id": chain_of.get(article.id),
        }
        if lexicon is not None and text:
            fields["activation"] = activation(text, lexicon)
        if gazetteer is not None:
            actors, minority, majority = tag_entities(text, gazetteer)
            fields.update(
                political_actors=actors,
                minority_mentions=minority,
                majority_mentions=majority,
            )
        corpus.update(replace(article, **fields))
    return corpus


_SIDECAR_FIELDS = (
    "complexity",
    "activation",
    "chain_id",
    "political_actors",
    "minority_mentions",
    "majority_mentions",
)


def load_sidecar(path: str | Path, corpus: Corpus) -> Corpus:
    """Override enrichment fields from a JSON-lines sidecar.

    Records carry ``id`` plus any subset of the enrichment fields; present
    fields replace computed values, absent fields stay untouched.  Records
    for unknown ids or with out-of-range values are rejected with a warning.
    """
    path = Path(path)
    for lineno, raw in enumerate(open(path, encoding="utf-8"), start=1):
        line = raw.strip()
        if not line:
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}:{lineno}: invalid JSON ({exc})") from None
        article_id = record.get("id")
        if article_id not in corpus:
            corpus.warn(f"{path}:{lineno}: sidecar record for unknown article {article_id!r} skipped")
            continue
        overrides = {}
        for field_name in _SIDECAR_FIELDS:
            if field_name not in record or record[field_name] is None:
                continue
            value = record[field_name]
            if field_name == "political_actors":
                value = frozenset(str(actor) for actor in value)
            elif field_name in ("minority_mentions", "majority_mentions"):
                value = int(value)
            elif field_name == "complexity" or field_name == "activation":
                value = float(value)
            overrides[field_name] = value
        if not overrides:
            continue
        try:
            updated = replace(corpus[article_id], **overrides)
        except Exception as exc:
            corpus.warn(f"{path}:{lineno}: record for {article_id!r} rejected ({exc})")
            continue
        corpus.update(updated)
    return corpus


def dump_enriched(corpus: Corpus, path: str | Path) -> None:
    """Write the enriched catalog as JSON lines, one article per input-order
    row; byte-stable for identical inputs.  The output doubles as a sidecar."""
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for article in corpus:
            record = {
                "id": article.id,
                "title": article.title,
                "body": article.body,
                "category": article.category,
                "subcategory": article.subcategory,
                "published_at": article.published_at,
                "complexity": article.complexity,
                "activation": article.activation,
                "chain_id": article.chain_id,
                "political_actors": sorted(article.political_actors),
                "minority_mentions": article.minority_mentions,
                "majority_mentions": article.majority_mentions,
            }
            handle.write(json.dumps(record, ensure_ascii=False, sort_keys=True) + "\n")
