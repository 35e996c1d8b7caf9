"""Pull-based HTTP surface over the in-process engine."""

from __future__ import annotations

from datetime import datetime

from fastapi import FastAPI, Header, Request
from fastapi.responses import JSONResponse, Response

from .core import GeoPoint, MissingField, OutOfRange, UsageEvent, ValidationError, parse_timestamp
from .engine import Engine, UnknownNews
from .geofilter import DuplicateId
from .ranker import Recommendation


def _error(status: int, code: str, message: str, field: str | None = None) -> JSONResponse:
    body = {"error": code, "message": message}
    if field:
        body["field"] = field
    return JSONResponse(status_code=status, content=body)


def _rec_json(rec: Recommendation) -> dict:
    return {"news_id": rec.news_id, "score": rec.score, "components": rec.components}


def create_app(engine: Engine) -> FastAPI:
    app = FastAPI(title="hyperfeed", docs_url=None, redoc_url=None)
    app.state.engine = engine

    @app.exception_handler(ValidationError)
    async def _validation_handler(_req: Request, exc: ValidationError):
        return _error(400, exc.code(), str(exc), exc.field)

    @app.get("/v1/health")
    async def health():
        return {"status": "ok"}

    @app.post("/v1/news", status_code=201)
    async def post_news(body: dict):
        try:
            item = engine.add_news(body)
        except DuplicateId as exc:
            return _error(409, "DuplicateId", f"news id already exists: {exc}", "id")
        return {"id": item.id}

    @app.post("/v1/events", status_code=202)
    async def post_events(body: dict):
        for name in ("user_id", "news_id", "kind", "at"):
            if body.get(name) is None:
                raise MissingField(name)
        loc = body.get("location")
        event = UsageEvent(
            user_id=str(body["user_id"]),
            news_id=str(body["news_id"]),
            kind=str(body["kind"]),
            at=parse_timestamp(str(body["at"])),
            location=GeoPoint(float(loc["lat"]), float(loc["lon"])) if loc else None,
        )
        try:
            engine.add_event(event)
        except UnknownNews:
            return _error(404, "UnknownNews", f"no such news item: {event.news_id}", "news_id")
        return {"accepted": True}

    @app.get("/v1/recommendations")
    async def recommendations(
        user_id: str,
        lat: float,
        lon: float,
        limit: int = 20,
        seed: int | None = None,
        x_now: str | None = Header(default=None),
    ):
        if not (-90.0 <= lat <= 90.0):
            raise OutOfRange("lat")
        if not (-180.0 <= lon <= 180.0):
            raise OutOfRange("lon")
        if not (1 <= limit <= 100):
            raise OutOfRange("limit")
        now: datetime | None = None
        if x_now is not None and engine.config.test_mode:
            now = parse_timestamp(x_now)
        recs = engine.recommend(user_id, GeoPoint(lat, lon), limit=limit, seed=seed, now=now)
        return {"items": [_rec_json(r) for r in recs]}

    @app.post("/v1/users/{user_id}/follows", status_code=204)
    async def post_follow(user_id: str, body: dict):
        followee = body.get("followee_id")
        if not followee:
            raise MissingField("followee_id")
        engine.follow(user_id, str(followee))
        return Response(status_code=204)

    @app.get("/v1/users/{user_id}/profile")
    async def get_profile(user_id: str):
        user = engine.get_user(user_id)
        if user is None:
            return _error(404, "UnknownUser", f"no such user: {user_id}")
        from .store import profile_to_record

        return profile_to_record(user)

    return app
