"""Shared domain types, validation and great-circle geometry."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Any, Iterable

EARTH_RADIUS_KM = 6371.0
KM_PER_DEG_LAT = math.pi * EARTH_RADIUS_KM / 180.0

EVENT_KINDS = frozenset({"read", "like", "comment", "impression", "dismiss"})


class ValidationError(ValueError):
    """Base for field-level rejections; `field` names the offender."""

    def __init__(self, field_name: str, message: str | None = None):
        self.field = field_name
        super().__init__(message or f"{self.code()}: {field_name}")

    @classmethod
    def code(cls) -> str:
        return cls.__name__


class MissingField(ValidationError):
    pass


class OutOfRange(ValidationError):
    pass


@dataclass(frozen=True)
class GeoPoint:
    lat: float
    lon: float

    def __post_init__(self):
        if not (-90.0 <= self.lat <= 90.0):
            raise OutOfRange("lat")
        if not (-180.0 <= self.lon <= 180.0):
            raise OutOfRange("lon")


def parse_timestamp(text: str) -> datetime:
    """Parse RFC 3339 text into an aware UTC datetime."""
    raw = text.strip()
    if raw.endswith(("Z", "z")):
        raw = raw[:-1] + "+00:00"
    try:
        dt = datetime.fromisoformat(raw)
    except ValueError as exc:
        raise OutOfRange("created_at", f"bad timestamp: {text!r}") from exc
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc)


def format_timestamp(dt: datetime) -> str:
    """Serialize an aware datetime as RFC 3339 with millisecond resolution."""
    dt = dt.astimezone(timezone.utc)
    return dt.strftime("%Y-%m-%dT%H:%M:%S.") + f"{dt.microsecond // 1000:03d}Z"


def normalize_hashtags(tags: Iterable[str]) -> frozenset[str]:
    return frozenset(t.lower().lstrip("#") for t in tags if t and t.lstrip("#"))


@dataclass(frozen=True)
class NewsItem:
    id: str
    description: str
    category: str
    channel: str
    hashtags: frozenset[str]
    location: GeoPoint
    created_at: datetime
    author_id: str
    media_ref: str | None = None


@dataclass(frozen=True)
class UsageEvent:
    user_id: str
    news_id: str
    kind: str
    at: datetime
    location: GeoPoint | None = None

    def __post_init__(self):
        if self.kind not in EVENT_KINDS:
            raise OutOfRange("kind", f"unknown event kind: {self.kind!r}")


class SocialGraph:
    """Directed follow edges; A follows B does not imply the converse."""

    def __init__(self):
        self._follows: dict[str, set[str]] = {}

    def follow(self, follower: str, followee: str) -> None:
        if follower == followee:
            raise OutOfRange("followee_id", "self-follows are not allowed")
        self._follows.setdefault(follower, set()).add(followee)

    def followees(self, user_id: str) -> frozenset[str]:
        return frozenset(self._follows.get(user_id, ()))


def haversine_km(a: GeoPoint, b: GeoPoint) -> float:
    """Great-circle distance on a spherical Earth (R = 6371 km)."""
    phi1 = math.radians(a.lat)
    phi2 = math.radians(b.lat)
    dphi = phi2 - phi1
    dlam = math.radians(b.lon - a.lon)
    h = math.sin(dphi / 2.0) ** 2 + math.cos(phi1) * math.cos(phi2) * math.sin(dlam / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_KM * math.asin(min(1.0, math.sqrt(h)))


_REQUIRED_NEWS_FIELDS = ("id", "description", "category", "channel", "location", "created_at", "author_id")


def validate_news(raw: dict[str, Any]) -> NewsItem:
    """Build a NewsItem from raw fields, rejecting missing or out-of-range data.

    Raises MissingField / OutOfRange naming the offending field. `description`
    may be empty but must be present; `media_ref` and `hashtags` are optional.
    """
    for name in _REQUIRED_NEWS_FIELDS:
        if raw.get(name) is None:
            raise MissingField(name)

    loc = raw["location"]
    if not isinstance(loc, GeoPoint):
        if not isinstance(loc, dict) or loc.get("lat") is None or loc.get("lon") is None:
            raise MissingField("location")
        loc = GeoPoint(float(loc["lat"]), float(loc["lon"]))

    created = raw["created_at"]
    if not isinstance(created, datetime):
        created = parse_timestamp(str(created))

    return NewsItem(
        id=str(raw["id"]),
        description=str(raw["description"]),
        category=str(raw["category"]),
        channel=str(raw["channel"]),
        hashtags=normalize_hashtags(raw.get("hashtags") or ()),
        location=loc,
        created_at=created,
        author_id=str(raw["author_id"]),
        media_ref=raw.get("media_ref"),
    )
