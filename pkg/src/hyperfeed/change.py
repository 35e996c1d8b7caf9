"""Short-term vs long-term interest tracking and shift-aware preference scoring."""

from __future__ import annotations

from dataclasses import dataclass

from .content import NewsProfile
from .learner import UserProfile


@dataclass(frozen=True)
class DecayConfig:
    short_half_life_hours: float = 24.0
    long_half_life_hours: float = 720.0
    shift_threshold: float = 0.4
    boost_factor: float = 1.5

    def __post_init__(self):
        if self.short_half_life_hours >= self.long_half_life_hours:
            raise ValueError("short half-life must be below the long half-life")
        if not (0.0 < self.shift_threshold <= 2.0):
            raise ValueError("shift_threshold must be in (0, 2]")
        if self.boost_factor < 1.0:
            raise ValueError("boost_factor must be >= 1")


@dataclass(frozen=True)
class ShiftReport:
    user_id: str
    l1_distance: float
    rising_topics: frozenset[str]


def bump(
    prefs: dict[str, float],
    topic: str,
    event_weight: float,
    dt_hours: float,
    half_life_hours: float,
) -> dict[str, float]:
    """Decay every weight by the elapsed time, then add event_weight to `topic`."""
    if dt_hours < 0:
        raise ValueError("dt_hours must be >= 0")
    decay = 0.5 ** (dt_hours / half_life_hours)
    out = {t: w * decay for t, w in prefs.items()}
    out[topic] = out.get(topic, 0.0) + event_weight
    return out


def _normalize(prefs: dict[str, float]) -> dict[str, float]:
    total = sum(prefs.values())
    if total <= 0:
        return {}
    return {t: w / total for t, w in prefs.items()}


def detect_shift(profile: UserProfile, cfg: DecayConfig) -> ShiftReport | None:
    """Report when the short-term distribution drifts from the long-term one."""
    short_total = sum(profile.short_term.values())
    long_total = sum(profile.long_term.values())
    if short_total <= 0 or long_total <= 0:
        return None
    ns = _normalize(profile.short_term)
    nl = _normalize(profile.long_term)
    topics = set(ns) | set(nl)
    distance = sum(abs(ns.get(t, 0.0) - nl.get(t, 0.0)) for t in topics)
    if distance <= cfg.shift_threshold:
        return None
    rising = frozenset(t for t in topics if ns.get(t, 0.0) - nl.get(t, 0.0) > cfg.shift_threshold / 2.0)
    return ShiftReport(user_id=profile.user_id, l1_distance=distance, rising_topics=rising)


def preference_score(item: NewsProfile, profile: UserProfile, cfg: DecayConfig) -> float:
    """Dot product of the blended preference distribution with the item's topics.

    The blend averages the normalized short- and long-term maps; topics in an
    active shift report are boosted and the blend rescaled back to its previous
    mass so it stays a sub-distribution.
    """
    ns = _normalize(profile.short_term)
    nl = _normalize(profile.long_term)
    blend = {t: 0.5 * ns.get(t, 0.0) + 0.5 * nl.get(t, 0.0) for t in set(ns) | set(nl)}
    total = sum(blend.values())
    if total <= 0:
        return 0.0

    shift = detect_shift(profile, cfg)
    if shift and shift.rising_topics:
        boosted = {t: w * (cfg.boost_factor if t in shift.rising_topics else 1.0) for t, w in blend.items()}
        boosted_total = sum(boosted.values())
        blend = {t: w * total / boosted_total for t, w in boosted.items()}

    if item.topic_vector.is_zero():
        item_weights = {item.category: 1.0}
    else:
        item_weights = item.topic_vector.weights
    score = sum(blend.get(t, 0.0) * w for t, w in item_weights.items())
    return min(1.0, max(0.0, score))
