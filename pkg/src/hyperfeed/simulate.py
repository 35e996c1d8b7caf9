"""Synthetic-user simulation and historical replay for measuring learning."""

from __future__ import annotations

import csv
import random
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from pathlib import Path
from typing import Sequence

from .core import GeoPoint, UsageEvent
from .engine import Engine, ServiceConfig
from .learner import START_STATE, greedy_action

SIM_EPOCH = datetime(2026, 1, 1, tzinfo=timezone.utc)
STEP_SECONDS = 30.0


@dataclass(frozen=True)
class SimScenario:
    n_users: int = 1
    n_items: int = 200
    steps: int = 1000
    k: int = 5
    seed: int = 0
    # one read-probability distribution per user over `topics`; cycled if
    # fewer distributions than users are given
    topics: tuple[str, ...] = ("events", "food", "traffic")
    ground_truth: tuple[tuple[float, ...], ...] = ((0.8, 0.15, 0.05),)
    center: GeoPoint = field(default_factory=lambda: GeoPoint(63.43, 10.39))

    def __post_init__(self):
        for dist in self.ground_truth:
            if len(dist) != len(self.topics):
                raise ValueError("ground-truth distribution arity mismatch")
            if abs(sum(dist) - 1.0) > 1e-9:
                raise ValueError("ground-truth distributions must sum to 1")


@dataclass
class SimMetrics:
    # (step, precision_at_k, greedy_accuracy)
    rows: list[tuple[int, float, float]] = field(default_factory=list)

    def write_csv(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["step", "precision_at_k", "greedy_accuracy"])
            for step, prec, acc in self.rows:
                writer.writerow([step, f"{prec:.6f}", f"{acc:.6f}"])

    def final_greedy_accuracy(self) -> float:
        return self.rows[-1][2] if self.rows else 0.0


def _keyword_for(engine: Engine, topic: str) -> str:
    for kw in (topic, topic.rstrip("s")):
        if engine.lexicon.topic_of(kw) == topic:
            return kw
    raise ValueError(f"topic {topic!r} has no keyword in the lexicon")


def _greedy_accuracy(engine: Engine, users: Sequence[str], top_topics: dict[str, str]) -> float:
    if not users:
        return 0.0
    good = 0
    for uid in users:
        profile = engine.get_user(uid)
        if profile is None:
            continue
        # topic states actually entered via consumption; the initial START
        # label is one-shot and never revisited, so it carries no signal
        visited = profile.visited_states() - {START_STATE}
        if visited and all(greedy_action(profile.qtable, s) == top_topics[uid] for s in visited):
            good += 1
    return good / len(users)


def simulate(scenario: SimScenario, config: ServiceConfig | None = None) -> SimMetrics:
    """Drive synthetic users through the real pipeline; reads are Bernoulli in
    the user's ground-truth weight on each shown item's topic, with a follow-up
    like half the time."""
    config = config or ServiceConfig()
    config.test_mode = True
    engine = Engine(config)
    rng = random.Random(scenario.seed)

    users = [f"sim-user-{i:03d}" for i in range(scenario.n_users)]
    gts = {
        uid: dict(zip(scenario.topics, scenario.ground_truth[i % len(scenario.ground_truth)]))
        for i, uid in enumerate(users)
    }
    top_topics = {uid: max(gt, key=lambda t: (gt[t], t)) for uid, gt in gts.items()}

    posted = 0

    def post_items(until: int, now: datetime) -> None:
        nonlocal posted
        while posted < until and posted < scenario.n_items:
            topic = scenario.topics[posted % len(scenario.topics)]
            engine.add_news(
                {
                    "id": f"sim-news-{posted:05d}",
                    "description": f"{_keyword_for(engine, topic)} update nearby",
                    "category": topic,
                    "channel": "sim",
                    "hashtags": [],
                    "location": {"lat": scenario.center.lat, "lon": scenario.center.lon},
                    "created_at": now.isoformat(),
                    "author_id": "sim-author",
                }
            )
            posted += 1

    metrics = SimMetrics()
    for step in range(scenario.steps):
        now = SIM_EPOCH + timedelta(seconds=STEP_SECONDS * step)
        # keep the feed warm at the start, then drip the rest in evenly
        target = max(2 * scenario.k, scenario.n_items * (step + 1) // scenario.steps)
        post_items(target, now)

        shown_total = 0
        on_topic = 0
        for uid in users:
            recs = engine.recommend(
                uid,
                scenario.center,
                limit=scenario.k,
                seed=rng.getrandbits(63),
                now=now,
            )
            for rec in recs:
                topic = engine.profiles[rec.news_id].dominant_topic
                shown_total += 1
                if topic == top_topics[uid]:
                    on_topic += 1
                p = gts[uid].get(topic, 0.0)
                # one engagement draw per shown item: like with p/2, read up to
                # total probability p, otherwise an impression (negative signal)
                u = rng.random()
                if u < p / 2.0:
                    engine.add_event(UsageEvent(uid, rec.news_id, "like", now, scenario.center))
                elif u < p:
                    engine.add_event(UsageEvent(uid, rec.news_id, "read", now, scenario.center))
                else:
                    engine.add_event(
                        UsageEvent(uid, rec.news_id, "impression", now, scenario.center)
                    )
        precision = on_topic / shown_total if shown_total else 0.0
        metrics.rows.append((step, precision, _greedy_accuracy(engine, users, top_topics)))
    return metrics


def replay(events_path: str | Path, k: int = 10, config: ServiceConfig | None = None) -> SimMetrics:
    """Feed a historical events.jsonl through a fresh engine, checking per read
    whether the item was in that user's preceding top-k."""
    from .store import StoreLayout

    events_path = Path(events_path)
    layout = StoreLayout(events_path.parent)
    config = config or ServiceConfig()
    config.test_mode = True
    engine = Engine(config)
    for item in layout.replay_news():
        engine.add_news(item)

    metrics = SimMetrics()
    hits = 0
    reads = 0
    for event in layout.replay_events():
        if event.kind == "read" and event.news_id in engine.profiles:
            loc = event.location or engine.profiles[event.news_id].location
            recs = engine.recommend(event.user_id, loc, limit=k, seed=0, now=event.at)
            reads += 1
            if any(r.news_id == event.news_id for r in recs):
                hits += 1
            metrics.rows.append((reads, hits / reads, 0.0))
        if event.news_id in engine.profiles:
            engine.add_event(event)
    return metrics
