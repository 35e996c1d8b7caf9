"""Context-factor scoring, diversity re-ranking and epsilon-greedy selection."""

from __future__ import annotations

import math
import random
from collections import deque
from dataclasses import dataclass, field, replace
from datetime import datetime
from typing import Mapping, Sequence

from .change import DecayConfig, preference_score
from .content import NewsProfile
from .core import SocialGraph
from .learner import UserProfile, greedy_action

LN2 = math.log(2.0)


@dataclass(frozen=True)
class RankWeights:
    w_pref: float = 0.4
    w_social: float = 0.2
    w_recency: float = 0.3
    w_trend: float = 0.1
    lambda_per_hour: float = LN2 / 6.0  # 6 h recency half-life
    epsilon: float = 0.1
    q_boost: float = 0.25
    diversity_decay: float = 0.7
    trend_window_hours: float = 2.0

    def __post_init__(self):
        ws = (self.w_pref, self.w_social, self.w_recency, self.w_trend)
        if any(w < 0 for w in ws) or abs(sum(ws) - 1.0) > 1e-9:
            raise ValueError("factor weights must be non-negative and sum to 1")
        if not (0.0 <= self.epsilon < 1.0):
            raise ValueError("epsilon must be in [0, 1)")
        if not (0.0 < self.diversity_decay <= 1.0):
            raise ValueError("diversity_decay must be in (0, 1]")


@dataclass(frozen=True)
class Recommendation:
    news_id: str
    score: float
    components: dict = field(default_factory=dict)


@dataclass(frozen=True)
class RankContext:
    """Snapshot of everything score() needs beyond the item and user."""

    now: datetime
    graph: SocialGraph
    # news_id -> users who read/liked/commented it
    interactors: Mapping[str, frozenset[str]]
    # news_id -> reads inside the trailing trend window ending at `now`
    window_reads: Mapping[str, int]
    pool: Sequence[str]
    author_of: Mapping[str, str]
    decay: DecayConfig = DecayConfig()


class AlreadyRead(RuntimeError):
    """Signals a pipeline bug: callers must exclude read items before scoring."""


def recency_weight(age_hours: float, lam: float) -> float:
    if age_hours < 0:
        age_hours = 0.0
    return math.exp(-lam * age_hours)


def social_weight(
    news_id: str,
    author_id: str,
    user_id: str,
    graph: SocialGraph,
    interactors: Mapping[str, frozenset[str]],
) -> float:
    """Fraction of followed users who interacted with the item; authorship by a
    followed user floors the weight at 0.5."""
    followees = graph.followees(user_id)
    engaged = interactors.get(news_id, frozenset())
    so = len(followees & engaged) / max(1, len(followees))
    if author_id in followees:
        so = max(so, 0.5)
    return so


def trend_weight(news_id: str, pool: Sequence[str], window_reads: Mapping[str, int]) -> float:
    """Window read count normalized by the pool maximum; 0 when nothing trends."""
    peak = max((window_reads.get(nid, 0) for nid in pool), default=0)
    if peak <= 0:
        return 0.0
    return window_reads.get(news_id, 0) / peak


def score(
    item: NewsProfile,
    profile: UserProfile,
    ctx: RankContext,
    weights: RankWeights,
) -> Recommendation:
    if item.news_id in profile.read_set:
        raise AlreadyRead(item.news_id)

    pref = preference_score(item, profile, ctx.decay)
    social = social_weight(
        item.news_id, ctx.author_of.get(item.news_id, ""), profile.user_id, ctx.graph, ctx.interactors
    )
    age_hours = (ctx.now - item.created_at).total_seconds() / 3600.0
    recency = recency_weight(age_hours, weights.lambda_per_hour)
    trend = trend_weight(item.news_id, ctx.pool, ctx.window_reads)

    base = (
        weights.w_pref * pref
        + weights.w_social * social
        + weights.w_recency * recency
        + weights.w_trend * trend
    )
    boosted = item.dominant_topic == greedy_action(profile.qtable, profile.last_state)
    total = base * (1.0 + weights.q_boost) if boosted else base
    return Recommendation(
        news_id=item.news_id,
        score=total,
        components={
            "pref": pref,
            "social": social,
            "recency": recency,
            "trend": trend,
            "q_boosted": boosted,
            "explored": False,
        },
    )


def diversify(
    scored: Sequence[Recommendation],
    topics: Mapping[str, str],
    delta: float,
) -> list[Recommendation]:
    """Greedy re-rank: each pick maximizes score * delta^(picks sharing its topic).

    `scored` must already be sorted descending; ties break on news_id.
    Within one topic the discount is identical, so the greedy choice is always
    some bucket head; that keeps this O(n * topics) instead of O(n^2).
    """
    buckets: dict[str, deque[Recommendation]] = {}
    for rec in scored:
        buckets.setdefault(topics.get(rec.news_id, ""), deque()).append(rec)
    picked: list[Recommendation] = []
    topic_counts: dict[str, int] = {}
    total = len(scored)
    while len(picked) < total:
        best_topic = None
        best_key = None
        for topic, queue in buckets.items():
            if not queue:
                continue
            head = queue[0]
            eff = head.score * delta ** topic_counts.get(topic, 0)
            key = (-eff, head.news_id)
            if best_key is None or key < best_key:
                best_key = key
                best_topic = topic
        chosen = buckets[best_topic].popleft()
        picked.append(chosen)
        topic_counts[best_topic] = topic_counts.get(best_topic, 0) + 1
    return picked


def select(
    diversified: Sequence[Recommendation],
    k: int,
    epsilon: float,
    rng: random.Random,
) -> list[Recommendation]:
    """Fill k slots; each slot explores uniformly with probability epsilon,
    otherwise exploits the next diversified candidate. With epsilon = 0 no
    randomness is consumed."""
    if k < 1:
        raise ValueError("k must be >= 1")
    remaining = list(diversified)
    out: list[Recommendation] = []
    while remaining and len(out) < k:
        if epsilon > 0.0 and rng.random() < epsilon:
            idx = rng.randrange(len(remaining))
            pick = remaining.pop(idx)
            pick = replace(pick, components={**pick.components, "explored": True})
        else:
            pick = remaining.pop(0)
        out.append(pick)
    return out
