"""In-process orchestration: ingest -> learn -> filter -> merge -> rank."""

from __future__ import annotations

import bisect
import random
import threading
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Mapping

from . import store as store_mod
from .change import DecayConfig, bump
from .content import NewsProfile, TopicLexicon, build_profile
from .core import GeoPoint, NewsItem, SocialGraph, UsageEvent, validate_news
from .geofilter import DuplicateId, FilterConfig, GeoGridIndex
from .learner import LearnerConfig, UserProfile, record_event, reward_for
from .ranker import RankContext, RankWeights, Recommendation, diversify, select
from .store import BaseScoreRow, StoreLayout, merge_online


class UnknownNews(KeyError):
    pass


@dataclass
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8000
    filter: FilterConfig = field(default_factory=FilterConfig)
    weights: RankWeights = field(default_factory=RankWeights)
    learner: LearnerConfig = field(default_factory=LearnerConfig)
    decay: DecayConfig = field(default_factory=DecayConfig)
    data_dir: Path | None = None
    seed: int | None = None
    test_mode: bool = False


class Engine:
    """Holds all live state; writes are serialized, reads run on snapshots."""

    def __init__(self, config: ServiceConfig | None = None, lexicon: TopicLexicon | None = None):
        self.config = config or ServiceConfig()
        self.lexicon = lexicon or TopicLexicon.default()
        self.items: dict[str, NewsItem] = {}
        self.profiles: dict[str, NewsProfile] = {}
        self.users: dict[str, UserProfile] = {}
        self.graph = SocialGraph()
        self.index = GeoGridIndex(self.config.filter.radius_km)
        self._interactors: dict[str, set[str]] = {}
        self._read_times: dict[str, list[datetime]] = {}
        self._lock = threading.RLock()
        self.store: StoreLayout | None = (
            StoreLayout(self.config.data_dir) if self.config.data_dir else None
        )
        self._batch_rows: dict[str, list[BaseScoreRow]] = {}
        self._batch_at: datetime | None = None
        if self.store is not None:
            self._replay_store()

    # -- state rebuild ------------------------------------------------------

    def _replay_store(self) -> None:
        assert self.store is not None
        for item in self.store.replay_news():
            self._admit_news(item, persist=False)
        for event in self.store.replay_events():
            self._apply_event(event, persist=False)

    # -- clock --------------------------------------------------------------

    def now(self, override: datetime | None = None) -> datetime:
        if override is not None and self.config.test_mode:
            return override
        return datetime.now(timezone.utc)

    # -- ingestion ----------------------------------------------------------

    def _admit_news(self, item: NewsItem, persist: bool) -> NewsProfile:
        if item.id in self.items:
            raise DuplicateId(item.id)
        profile = build_profile(item, self.lexicon)
        with self._lock:
            self.index.insert(profile)
            self.items[item.id] = item
            self.profiles[item.id] = profile
            if persist and self.store is not None:
                self.store.append_news(item)
        return profile

    def add_news(self, raw: dict) -> NewsItem:
        item = raw if isinstance(raw, NewsItem) else validate_news(raw)
        self._admit_news(item, persist=True)
        return item

    def get_user(self, user_id: str, create: bool = False) -> UserProfile | None:
        user = self.users.get(user_id)
        if user is None and create:
            user = UserProfile(user_id=user_id)
            self.users[user_id] = user
        return user

    def _apply_event(self, event: UsageEvent, persist: bool) -> None:
        item_profile = self.profiles.get(event.news_id)
        if item_profile is None:
            raise UnknownNews(event.news_id)
        with self._lock:
            user = self.get_user(event.user_id, create=True)
            if persist and self.store is not None:
                self.store.append_event(event)
            record_event(user, event, item_profile, self.config.learner)
            # decay-then-add interest bumps on both horizons
            dt_hours = 0.0
            if user.last_update_at is not None:
                dt_hours = max(0.0, (event.at - user.last_update_at).total_seconds() / 3600.0)
            weight = max(0.0, reward_for(event.kind, self.config.learner))
            topic = item_profile.dominant_topic
            user.short_term = bump(
                user.short_term, topic, weight, dt_hours, self.config.decay.short_half_life_hours
            )
            user.long_term = bump(
                user.long_term, topic, weight, dt_hours, self.config.decay.long_half_life_hours
            )
            user.last_update_at = event.at
            if event.kind in ("read", "like", "comment"):
                self._interactors.setdefault(event.news_id, set()).add(event.user_id)
            if event.kind == "read":
                bisect.insort(self._read_times.setdefault(event.news_id, []), event.at)

    def add_event(self, event: UsageEvent) -> None:
        self._apply_event(event, persist=True)

    def follow(self, follower: str, followee: str) -> None:
        with self._lock:
            self.graph.follow(follower, followee)
            self.get_user(follower, create=True)

    # -- batch tables -------------------------------------------------------

    def load_batch(self, base_rows: list[BaseScoreRow], at: datetime) -> None:
        grouped: dict[str, list[BaseScoreRow]] = {}
        for row in base_rows:
            grouped.setdefault(row.user_id, []).append(row)
        with self._lock:
            self._batch_rows = grouped
            self._batch_at = at

    # -- serving ------------------------------------------------------------

    def _window_reads(self, pool: list[str], now: datetime) -> dict[str, int]:
        horizon = now.timestamp() - self.config.weights.trend_window_hours * 3600.0
        counts = {}
        for nid in pool:
            times = self._read_times.get(nid)
            if not times:
                continue
            lo = bisect.bisect_right(times, datetime.fromtimestamp(horizon, tz=timezone.utc))
            hi = bisect.bisect_right(times, now)
            if hi > lo:
                counts[nid] = hi - lo
        return counts

    def rank_context(self, pool: list[str], now: datetime) -> RankContext:
        return RankContext(
            now=now,
            graph=self.graph,
            interactors={nid: frozenset(us) for nid, us in self._interactors.items()},
            window_reads=self._window_reads(pool, now),
            pool=pool,
            author_of={nid: self.items[nid].author_id for nid in pool if nid in self.items},
            decay=self.config.decay,
        )

    def recommend(
        self,
        user_id: str,
        location: GeoPoint,
        limit: int = 20,
        seed: int | None = None,
        now: datetime | None = None,
    ) -> list[Recommendation]:
        now = self.now(now)
        user = self.get_user(user_id) or UserProfile(user_id=user_id)
        candidate_ids = self.index.query(location, now, self.config.filter)
        unread = [nid for nid in candidate_ids if nid not in user.read_set]

        base_ids = {row.news_id for row in self._batch_rows.get(user_id, ())}
        base_rows = [row for row in self._batch_rows.get(user_id, ()) if row.news_id in set(unread)]
        fresh = [self.profiles[nid] for nid in unread if nid not in base_ids]

        ctx = self.rank_context(unread, now)
        merged = merge_online(
            base_rows, (), fresh, user, self.profiles, ctx, self.config.weights
        )
        ordered = diversify(
            merged,
            {nid: self.profiles[nid].dominant_topic for nid in unread},
            self.config.weights.diversity_decay,
        )
        if seed is None:
            seed = self.config.seed
        rng = random.Random(seed) if seed is not None else random.Random()
        return select(ordered, limit, self.config.weights.epsilon, rng)


# ---------------------------------------------------------------------------
# Offline batch run


def run_batch(
    data_dir: Path,
    out_dir: Path,
    config: ServiceConfig | None = None,
    now: datetime | None = None,
    workers: int = 1,
    top_k: int = 20,
) -> tuple[int, int]:
    """Rebuild state from the store and write both batch CSVs.

    Returns (similarity row count, base row count).
    """
    config = config or ServiceConfig()
    engine = Engine(ServiceConfig(
        filter=config.filter,
        weights=config.weights,
        learner=config.learner,
        decay=config.decay,
        data_dir=data_dir,
        test_mode=True,
    ))
    if now is None:
        latest = [i.created_at for i in engine.items.values()]
        latest += [u.last_update_at for u in engine.users.values() if u.last_update_at]
        now = max(latest) if latest else datetime.now(timezone.utc)

    profiles = list(engine.profiles.values())
    sim_rows = store_mod.build_news_similarity(profiles, top_k=top_k, workers=workers)

    pool = sorted(engine.profiles)
    ctx = engine.rank_context(pool, now)
    base_rows = store_mod.build_user_news_base(
        list(engine.users.values()), profiles, ctx, config.weights
    )

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    store_mod.write_similarity_csv(sim_rows, out_dir / store_mod.SIMILARITY_FILE)
    store_mod.write_base_csv(base_rows, out_dir / store_mod.BASE_FILE)
    return len(sim_rows), len(base_rows)
