"""Spatio-temporal candidate filtering backed by a latitude-banded grid index."""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import datetime

from .content import NewsProfile
from .core import GeoPoint, KM_PER_DEG_LAT, haversine_km

# Absorbs float round-trip noise at the inclusive boundary (~1 micrometer / ~4 µs).
_EDGE_EPS = 1e-9

# Above this latitude the equirectangular cells degenerate; fall back to a scan.
_POLAR_LAT = 85.0


@dataclass(frozen=True)
class FilterConfig:
    radius_km: float = 5.0
    max_age_hours: float = 24.0

    def __post_init__(self):
        if self.radius_km <= 0 or self.max_age_hours <= 0:
            raise ValueError("radius_km and max_age_hours must be positive")


class StaleIndex(RuntimeError):
    pass


class DuplicateId(ValueError):
    pass


def passes(item: NewsProfile, user_loc: GeoPoint, now: datetime, cfg: FilterConfig) -> bool:
    """True iff the item is within radius and age window; boundaries inclusive."""
    if haversine_km(user_loc, item.location) > cfg.radius_km + _EDGE_EPS:
        return False
    age_hours = (now - item.created_at).total_seconds() / 3600.0
    return age_hours <= cfg.max_age_hours + _EDGE_EPS


class GeoGridIndex:
    """Grid over an equirectangular projection; cell size equals the query radius,
    so a 3x3 cell neighborhood (widened across the antimeridian) covers the disk.
    """

    def __init__(self, cell_size_km: float):
        if cell_size_km <= 0:
            raise ValueError("cell_size_km must be positive")
        self.cell_size_km = cell_size_km
        self._cells: dict[tuple[int, int], list[tuple[str, GeoPoint, datetime]]] = {}
        self._polar: list[tuple[str, GeoPoint, datetime]] = []
        self._by_id: dict[str, tuple[int, int] | None] = {}

    def __len__(self) -> int:
        return len(self._by_id)

    def _row_of(self, lat: float) -> int:
        return math.floor(lat * KM_PER_DEG_LAT / self.cell_size_km)

    def _deg_per_cell_lon(self, row: int) -> float:
        band_lat = (row + 0.5) * self.cell_size_km / KM_PER_DEG_LAT
        band_lat = max(-_POLAR_LAT, min(_POLAR_LAT, band_lat))
        km_per_deg = KM_PER_DEG_LAT * math.cos(math.radians(band_lat))
        return self.cell_size_km / km_per_deg

    def _cell_of(self, p: GeoPoint) -> tuple[int, int] | None:
        if abs(p.lat) > _POLAR_LAT:
            return None
        row = self._row_of(p.lat)
        col = math.floor(p.lon / self._deg_per_cell_lon(row))
        return (row, col)

    def insert(self, item: NewsProfile) -> None:
        if item.news_id in self._by_id:
            raise DuplicateId(item.news_id)
        cell = self._cell_of(item.location)
        entry = (item.news_id, item.location, item.created_at)
        if cell is None:
            self._polar.append(entry)
        else:
            self._cells.setdefault(cell, []).append(entry)
        self._by_id[item.news_id] = cell

    def evict_older_than(self, cutoff: datetime) -> int:
        """Drop everything created before `cutoff`; returns the removed count."""
        removed = 0
        for cell, entries in list(self._cells.items()):
            kept = [e for e in entries if e[2] >= cutoff]
            removed += len(entries) - len(kept)
            if kept:
                self._cells[cell] = kept
            else:
                del self._cells[cell]
        kept_polar = [e for e in self._polar if e[2] >= cutoff]
        removed += len(self._polar) - len(kept_polar)
        self._polar = kept_polar
        if removed:
            live = {e[0] for es in self._cells.values() for e in es}
            live.update(e[0] for e in self._polar)
            self._by_id = {nid: cell for nid, cell in self._by_id.items() if nid in live}
        return removed

    def _candidate_entries(self, user_loc: GeoPoint):
        if abs(user_loc.lat) > _POLAR_LAT:
            # Polar query: grid geometry unreliable, scan everything.
            for entries in self._cells.values():
                yield from entries
            yield from self._polar
            return
        row0 = self._row_of(user_loc.lat)
        # Worst-case longitudinal reach (degrees) over the row neighborhood:
        # cells narrow toward the poles, so one radius can span >1 cell there.
        lat_extreme = min(
            _POLAR_LAT,
            self.cell_size_km / KM_PER_DEG_LAT * max(abs(row0 - 1), abs(row0 + 2)),
        )
        dlon_max = self.cell_size_km / (KM_PER_DEG_LAT * math.cos(math.radians(lat_extreme)))
        seen_cells: set[tuple[int, int]] = set()
        for row in (row0 - 1, row0, row0 + 1):
            deg = self._deg_per_cell_lon(row)
            span = math.ceil(dlon_max / deg)
            # Re-quantize the query longitude per row, and again shifted by
            # ±360° when the neighborhood could cross the antimeridian.
            base_lons = [user_loc.lon]
            if user_loc.lon + span * deg > 180.0:
                base_lons.append(user_loc.lon - 360.0)
            if user_loc.lon - span * deg < -180.0:
                base_lons.append(user_loc.lon + 360.0)
            for lon in base_lons:
                col0 = math.floor(lon / deg)
                for col in range(col0 - span, col0 + span + 1):
                    cell = (row, col)
                    if cell in seen_cells:
                        continue
                    seen_cells.add(cell)
                    yield from self._cells.get(cell, ())
        yield from self._polar

    def query(self, user_loc: GeoPoint, now: datetime, cfg: FilterConfig) -> list[str]:
        """Ids of indexed items passing the spatio-temporal filter at (loc, now)."""
        if cfg.radius_km != self.cell_size_km:
            raise StaleIndex(
                f"index built for radius {self.cell_size_km} km, queried with {cfg.radius_km} km"
            )
        radius = cfg.radius_km + _EDGE_EPS
        max_age_s = cfg.max_age_hours * 3600.0 + _EDGE_EPS * 3600.0
        out = []
        for news_id, loc, created in self._candidate_entries(user_loc):
            if (now - created).total_seconds() > max_age_s:
                continue
            if haversine_km(user_loc, loc) <= radius:
                out.append(news_id)
        return out
