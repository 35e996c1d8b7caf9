from __future__ import annotations

from datetime import datetime, timedelta, timezone

import pytest

from hyperfeed.content import TopicLexicon, build_profile
from hyperfeed.core import GeoPoint, NewsItem, normalize_hashtags

EPOCH = datetime(2026, 1, 1, 12, 0, 0, tzinfo=timezone.utc)


@pytest.fixture(scope="session")
def lexicon() -> TopicLexicon:
    return TopicLexicon.default()


def make_item(
    news_id: str,
    description: str = "",
    category: str = "events",
    lat: float = 63.43,
    lon: float = 10.39,
    created_at: datetime | None = None,
    hashtags=(),
    author_id: str = "author-1",
    channel: str = "local",
) -> NewsItem:
    return NewsItem(
        id=news_id,
        description=description,
        category=category,
        channel=channel,
        hashtags=normalize_hashtags(hashtags),
        location=GeoPoint(lat, lon),
        created_at=created_at or EPOCH,
        author_id=author_id,
    )


def make_profile(lexicon: TopicLexicon, news_id: str, **kwargs):
    return build_profile(make_item(news_id, **kwargs), lexicon)


def hours(h: float) -> timedelta:
    return timedelta(hours=h)
