"""Seeded hyperfeed service for the frontend integration suite.

Runs in test mode with a fixed seed and exploration off, so responses are a
pure function of the event history and the X-Now header the client sends.

Usage: python3 fixture_server.py PORT
"""

from __future__ import annotations

import sys
from datetime import datetime, timedelta, timezone

import uvicorn
from fastapi.middleware.cors import CORSMiddleware

from hyperfeed.core import GeoPoint, UsageEvent
from hyperfeed.engine import Engine, ServiceConfig
from hyperfeed.ranker import RankWeights
from hyperfeed.service import create_app

EPOCH = datetime(2026, 1, 1, 12, 0, 0, tzinfo=timezone.utc)
CENTER = GeoPoint(63.43, 10.39)


def build_engine() -> Engine:
    engine = Engine(
        ServiceConfig(test_mode=True, seed=7, weights=RankWeights(epsilon=0.0))
    )
    fixtures = [
        ("n1", "food", "fresh sushi platters at the harbor stand", 0),
        ("n2", "traffic", "traffic jam on the ring road", 10),
        ("n3", "food", "street food trucks by the square", 20),
        ("n4", "traffic", "roadwork closes the north bridge lane", 30),
        ("n5", "food", "new bakery tasting this afternoon", 40),
        ("n6", "traffic", "bus detour around the stadium", 50),
    ]
    for news_id, category, description, age_minutes in fixtures:
        engine.add_news(
            {
                "id": news_id,
                "description": description,
                "category": category,
                "channel": "local",
                "hashtags": [],
                "location": {"lat": CENTER.lat, "lon": CENTER.lon},
                "created_at": (EPOCH - timedelta(minutes=age_minutes)).isoformat(),
                "author_id": "seed-author",
            }
        )
    # background reads from another user so trend weights are non-trivial
    for news_id in ("n1", "n2"):
        engine.add_event(
            UsageEvent("background-user", news_id, "read", EPOCH, CENTER)
        )
    return engine


def main() -> None:
    port = int(sys.argv[1])
    app = create_app(build_engine())
    # the test DOM runs on a different origin than the service
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    uvicorn.run(app, host="127.0.0.1", port=port, log_level="warning")


if __name__ == "__main__":
    main()
