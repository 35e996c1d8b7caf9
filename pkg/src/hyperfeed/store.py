"""Append-only persistence plus the offline batch tables and the online merge."""

from __future__ import annotations

import csv
import errno
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Sequence

from .content import NewsProfile, SimilarityWeights, similarity
from .core import GeoPoint, NewsItem, UsageEvent, format_timestamp, parse_timestamp, validate_news
from .learner import QTable, UserProfile
from .ranker import RankContext, RankWeights, Recommendation, score

NEWS_FILE = "news.jsonl"
EVENTS_FILE = "events.jsonl"
PROFILES_FILE = "profiles.jsonl"
SIMILARITY_FILE = "news_similarity.csv"
BASE_FILE = "user_news_base.csv"

SIMILARITY_HEADER = ["news_id", "similar_news", "similarity_score"]
BASE_HEADER = ["user_id", "news_id", "recommendation_score"]


class CorruptRecord(ValueError):
    def __init__(self, line_number: int, reason: str = "unparseable record"):
        self.line_number = line_number
        super().__init__(f"line {line_number}: {reason}")


class StorageFull(OSError):
    pass


@dataclass(frozen=True)
class SimilarityRow:
    news_id: str
    similar_news: str
    similarity_score: float


@dataclass(frozen=True)
class BaseScoreRow:
    user_id: str
    news_id: str
    recommendation_score: float


# ---------------------------------------------------------------------------
# JSONL logs

def news_to_record(item: NewsItem) -> dict:
    return {
        "id": item.id,
        "media_ref": item.media_ref,
        "description": item.description,
        "category": item.category,
        "channel": item.channel,
        "hashtags": sorted(item.hashtags),
        "location": {"lat": item.location.lat, "lon": item.location.lon},
        "created_at": format_timestamp(item.created_at),
        "author_id": item.author_id,
    }


def news_from_record(rec: dict) -> NewsItem:
    return validate_news(rec)


def event_to_record(event: UsageEvent) -> dict:
    return {
        "user_id": event.user_id,
        "news_id": event.news_id,
        "kind": event.kind,
        "at": format_timestamp(event.at),
        "location": (
            {"lat": event.location.lat, "lon": event.location.lon} if event.location else None
        ),
    }


def event_from_record(rec: dict) -> UsageEvent:
    loc = rec.get("location")
    return UsageEvent(
        user_id=rec["user_id"],
        news_id=rec["news_id"],
        kind=rec["kind"],
        at=parse_timestamp(rec["at"]),
        location=GeoPoint(loc["lat"], loc["lon"]) if loc else None,
    )


class JsonlLog:
    """Append-only newline-delimited JSON file; offsets are byte positions."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)

    def append(self, record: dict) -> int:
        line = json.dumps(record, ensure_ascii=False, separators=(",", ":")) + "\n"
        try:
            with open(self.path, "a", encoding="utf-8") as fh:
                offset = fh.tell()
                fh.write(line)
                fh.flush()
                os.fsync(fh.fileno())
        except OSError as exc:
            if exc.errno == errno.ENOSPC:
                raise StorageFull(str(self.path)) from exc
            raise
        return offset

    def replay(self) -> Iterator[dict]:
        if not self.path.exists():
            return
        with open(self.path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                stripped = line.strip()
                if not stripped:
                    continue
                try:
                    yield json.loads(stripped)
                except json.JSONDecodeError as exc:
                    raise CorruptRecord(lineno, str(exc)) from exc


def profile_to_record(profile: UserProfile) -> dict:
    return {
        "user_id": profile.user_id,
        "q": sorted([s, a, v] for (s, a), v in profile.qtable.entries().items()),
        "short_term": dict(sorted(profile.short_term.items())),
        "long_term": dict(sorted(profile.long_term.items())),
        "read_set": sorted(profile.read_set),
        "last_state": profile.last_state,
        "last_update_at": (
            format_timestamp(profile.last_update_at) if profile.last_update_at else None
        ),
    }


def profile_from_record(rec: dict) -> UserProfile:
    q = QTable()
    for s, a, v in rec.get("q", ()):
        q.set(s, a, v)
    return UserProfile(
        user_id=rec["user_id"],
        qtable=q,
        short_term=dict(rec.get("short_term", {})),
        long_term=dict(rec.get("long_term", {})),
        read_set=set(rec.get("read_set", ())),
        last_state=rec["last_state"],
        last_update_at=(
            parse_timestamp(rec["last_update_at"]) if rec.get("last_update_at") else None
        ),
    )


@dataclass
class StoreLayout:
    data_dir: Path

    def __post_init__(self):
        self.data_dir = Path(self.data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)

    @property
    def news_log(self) -> JsonlLog:
        return JsonlLog(self.data_dir / NEWS_FILE)

    @property
    def events_log(self) -> JsonlLog:
        return JsonlLog(self.data_dir / EVENTS_FILE)

    @property
    def profiles_log(self) -> JsonlLog:
        return JsonlLog(self.data_dir / PROFILES_FILE)

    @property
    def similarity_csv(self) -> Path:
        return self.data_dir / SIMILARITY_FILE

    @property
    def base_csv(self) -> Path:
        return self.data_dir / BASE_FILE

    def append_news(self, item: NewsItem) -> int:
        return self.news_log.append(news_to_record(item))

    def append_event(self, event: UsageEvent) -> int:
        return self.events_log.append(event_to_record(event))

    def replay_news(self) -> Iterator[NewsItem]:
        for rec in self.news_log.replay():
            yield news_from_record(rec)

    def replay_events(self) -> Iterator[UsageEvent]:
        for rec in self.events_log.replay():
            yield event_from_record(rec)


# ---------------------------------------------------------------------------
# Batch tables

def _similar_rows_for(
    profile: NewsProfile,
    all_profiles: Sequence[NewsProfile],
    top_k: int,
    weights: SimilarityWeights,
) -> list[SimilarityRow]:
    scored = [
        (similarity(profile, other, weights), other.news_id)
        for other in all_profiles
        if other.news_id != profile.news_id
    ]
    scored.sort(key=lambda sv: (-sv[0], sv[1]))
    return [
        SimilarityRow(profile.news_id, nid, s) for s, nid in scored[:top_k]
    ]


def build_news_similarity(
    profiles: Sequence[NewsProfile],
    top_k: int = 20,
    workers: int = 1,
    weights: SimilarityWeights = SimilarityWeights(),
) -> list[SimilarityRow]:
    """Top-k most similar items per item; output is invariant to worker count."""
    ordered = sorted(profiles, key=lambda p: p.news_id)
    if workers <= 1:
        chunks = [[_similar_rows_for(p, ordered, top_k, weights) for p in ordered]]
    else:
        partitions = [ordered[i::workers] for i in range(workers)]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(
                pool.map(
                    lambda part: [_similar_rows_for(p, ordered, top_k, weights) for p in part],
                    partitions,
                )
            )
    rows = [row for chunk in chunks for rows_ in chunk for row in rows_]
    rows.sort(key=lambda r: (r.news_id, -r.similarity_score, r.similar_news))
    return rows


def build_user_news_base(
    users: Sequence[UserProfile],
    items: Sequence[NewsProfile],
    ctx: RankContext,
    weights: RankWeights,
) -> list[BaseScoreRow]:
    """Batch user x unread-item scores; no exploration, no diversification."""
    rows = []
    for user in sorted(users, key=lambda u: u.user_id):
        for item in sorted(items, key=lambda p: p.news_id):
            if item.news_id in user.read_set:
                continue
            rec = score(item, user, ctx, weights)
            rows.append(BaseScoreRow(user.user_id, item.news_id, rec.score))
    return rows


def merge_online(
    base_rows: Sequence[BaseScoreRow],
    read_since_batch: Iterable[str],
    fresh_items: Sequence[NewsProfile],
    user: UserProfile,
    items_by_id: Mapping[str, NewsProfile],
    ctx: RankContext,
    weights: RankWeights,
) -> list[Recommendation]:
    """Merge batch rows with post-batch activity: drop newly read items, rescore
    surviving rows with query-time recency/trend, add fresh items on the fly."""
    read_now = set(read_since_batch) | user.read_set
    candidate_ids: list[str] = []
    seen: set[str] = set()
    for row in base_rows:
        if row.news_id in read_now or row.news_id in seen or row.news_id not in items_by_id:
            continue
        seen.add(row.news_id)
        candidate_ids.append(row.news_id)
    for item in fresh_items:
        if item.news_id in read_now or item.news_id in seen:
            continue
        seen.add(item.news_id)
        candidate_ids.append(item.news_id)
    merged = [score(items_by_id[nid], user, ctx, weights) for nid in candidate_ids]
    merged.sort(key=lambda rec: (-rec.score, rec.news_id))
    return merged


# ---------------------------------------------------------------------------
# CSV output (6-decimal scores, byte-stable)

def write_similarity_csv(rows: Sequence[SimilarityRow], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SIMILARITY_HEADER)
        for row in rows:
            writer.writerow([row.news_id, row.similar_news, f"{row.similarity_score:.6f}"])


def write_base_csv(rows: Sequence[BaseScoreRow], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(BASE_HEADER)
        for row in rows:
            writer.writerow([row.user_id, row.news_id, f"{row.recommendation_score:.6f}"])


def read_base_csv(path: str | Path) -> list[BaseScoreRow]:
    rows = []
    p = Path(path)
    if not p.exists():
        return rows
    with open(p, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != BASE_HEADER:
            raise CorruptRecord(1, f"unexpected header {header!r}")
        for rec in reader:
            rows.append(BaseScoreRow(rec[0], rec[1], float(rec[2])))
    return rows
