"""Hyper-local context-aware news recommender."""

from .core import GeoPoint, NewsItem, SocialGraph, UsageEvent, haversine_km, validate_news
from .engine import Engine, ServiceConfig

__all__ = [
    "Engine",
    "GeoPoint",
    "NewsItem",
    "ServiceConfig",
    "SocialGraph",
    "UsageEvent",
    "haversine_km",
    "validate_news",
]

__version__ = "0.1.0"
