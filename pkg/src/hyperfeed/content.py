"""Topic extraction from news text and content-based similarity."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping

from .core import GeoPoint, NewsItem
from datetime import datetime

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


class LexiconError(ValueError):
    pass


class TopicLexicon:
    """Keyword-to-topic mapping; each keyword belongs to exactly one topic."""

    def __init__(self, pairs: Iterable[tuple[str, str]], *, strict: bool = False):
        self.topics: list[str] = []
        self._keyword_topic: dict[str, str] = {}
        for topic, keyword in pairs:
            topic = topic.strip()
            keyword = keyword.strip().lower()
            if topic not in self.topics:
                self.topics.append(topic)
            if keyword in self._keyword_topic:
                if strict:
                    raise LexiconError(f"duplicate keyword: {keyword!r}")
                continue  # first-listed topic wins
            self._keyword_topic[keyword] = topic

    def topic_of(self, keyword: str) -> str | None:
        return self._keyword_topic.get(keyword)

    @classmethod
    def load(cls, path: str | Path) -> "TopicLexicon":
        """Load a UTF-8 `topic<TAB>keyword` file; duplicates are rejected."""
        pairs = []
        seen: dict[str, int] = {}
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.rstrip("\n")
                if not line or line.startswith("#"):
                    continue
                if "\t" not in line:
                    raise LexiconError(f"{path}:{lineno}: expected 'topic<TAB>keyword'")
                topic, keyword = line.split("\t", 1)
                keyword = keyword.strip().lower()
                if keyword in seen:
                    raise LexiconError(
                        f"{path}:{lineno}: duplicate keyword {keyword!r} (first at line {seen[keyword]})"
                    )
                seen[keyword] = lineno
                pairs.append((topic, keyword))
        return cls(pairs)

    @classmethod
    def default(cls) -> "TopicLexicon":
        with resources.as_file(resources.files("hyperfeed.data") / "topics.tsv") as p:
            return cls.load(p)


@dataclass(frozen=True)
class TopicVector:
    """Per-topic weights; either all-zero or L1-normalized."""

    weights: Mapping[str, float]

    def is_zero(self) -> bool:
        return not self.weights

    def dominant(self) -> str | None:
        if not self.weights:
            return None
        # highest weight, ties to the lexicographically smallest label
        return min(self.weights, key=lambda t: (-self.weights[t], t))

    @staticmethod
    def from_counts(counts: Mapping[str, float]) -> "TopicVector":
        total = sum(v for v in counts.values() if v > 0)
        if total <= 0:
            return TopicVector({})
        return TopicVector({t: v / total for t, v in counts.items() if v > 0})


@dataclass(frozen=True)
class NewsProfile:
    news_id: str
    topic_vector: TopicVector
    dominant_topic: str
    category: str
    channel: str
    hashtags: frozenset[str]
    location: GeoPoint
    created_at: datetime


def tokenize(text: str) -> list[str]:
    return _TOKEN_RE.findall(text.lower())


def analyze(description: str, hashtags: Iterable[str], lexicon: TopicLexicon) -> TopicVector:
    """Count lexicon keyword hits per topic; hashtag exact matches count double."""
    counts: dict[str, float] = {}
    for token in tokenize(description):
        topic = lexicon.topic_of(token)
        if topic is not None:
            counts[topic] = counts.get(topic, 0.0) + 1.0
    for tag in hashtags:
        topic = lexicon.topic_of(tag.lower().lstrip("#"))
        if topic is not None:
            counts[topic] = counts.get(topic, 0.0) + 2.0
    return TopicVector.from_counts(counts)


def build_profile(item: NewsItem, lexicon: TopicLexicon) -> NewsProfile:
    vec = analyze(item.description, item.hashtags, lexicon)
    dominant = vec.dominant() or item.category
    return NewsProfile(
        news_id=item.id,
        topic_vector=vec,
        dominant_topic=dominant,
        category=item.category,
        channel=item.channel,
        hashtags=item.hashtags,
        location=item.location,
        created_at=item.created_at,
    )


@dataclass(frozen=True)
class SimilarityWeights:
    cosine: float = 0.6
    category: float = 0.2
    hashtags: float = 0.2


def _cosine(a: TopicVector, b: TopicVector) -> float:
    if a.is_zero() or b.is_zero():
        return 0.0
    dot = sum(w * b.weights.get(t, 0.0) for t, w in a.weights.items())
    na = math.sqrt(sum(w * w for w in a.weights.values()))
    nb = math.sqrt(sum(w * w for w in b.weights.values()))
    return dot / (na * nb)


def _jaccard(a: frozenset[str], b: frozenset[str]) -> float:
    if not a and not b:
        return 0.0
    return len(a & b) / len(a | b)


def similarity(a: NewsProfile, b: NewsProfile, weights: SimilarityWeights = SimilarityWeights()) -> float:
    """Blend of topic cosine, category match and hashtag Jaccard, in [0, 1]."""
    score = (
        weights.cosine * _cosine(a.topic_vector, b.topic_vector)
        + weights.category * (1.0 if a.category == b.category else 0.0)
        + weights.hashtags * _jaccard(a.hashtags, b.hashtags)
    )
    return min(1.0, max(0.0, score))
