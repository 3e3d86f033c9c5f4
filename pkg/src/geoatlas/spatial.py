"""Spatial queries over a parsed document: bbox filter, k-nearest, click picking."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .geo import BBox, GeoPoint, haversine_distance_m
from .kml import Document, Polygon

HIT_MARKER = "marker"
HIT_POLYGON_INTERIOR = "polygon-interior"

# ~110 m at the equator; a forgiving default for clicking markers.
DEFAULT_PICK_TOLERANCE_DEG = 1e-3


@dataclass(frozen=True)
class IndexEntry:
    placemark_id: str
    point: GeoPoint  # representative point
    polygon: Polygon | None


@dataclass(frozen=True)
class PickResult:
    placemark_id: str
    distance_m: float
    hit_kind: str  # HIT_MARKER or HIT_POLYGON_INTERIOR


def polygon_centroid(poly: Polygon) -> GeoPoint:
    """Arithmetic mean of the outer ring's distinct vertices in the lat/lng plane."""
    seen: set[tuple[float, float]] = set()
    lat_sum = lng_sum = 0.0
    for v in poly.outer.vertices:
        key = (v.lat_deg, v.lng_deg)
        if key in seen:
            continue
        seen.add(key)
        lat_sum += v.lat_deg
        lng_sum += v.lng_deg
    n = len(seen)
    return GeoPoint(lat_sum / n, lng_sum / n)


def _on_segment(px: float, py: float, x1: float, y1: float, x2: float, y2: float) -> bool:
    cross = (px - x1) * (y2 - y1) - (py - y1) * (x2 - x1)
    if cross != 0.0:
        return False
    return min(x1, x2) <= px <= max(x1, x2) and min(y1, y2) <= py <= max(y1, y2)


def point_in_polygon(p: GeoPoint, poly: Polygon) -> bool:
    """Even-odd (ray casting) containment in the lat/lng plane.

    Points on any edge or vertex count as inside; inner rings subtract
    (a point inside a hole crosses an odd number of extra edges).
    """
    x, y = p.lng_deg, p.lat_deg
    rings = (poly.outer, *poly.inners)
    for ring in rings:
        vs = ring.vertices
        for i in range(len(vs) - 1):
            if _on_segment(x, y, vs[i].lng_deg, vs[i].lat_deg,
                           vs[i + 1].lng_deg, vs[i + 1].lat_deg):
                return True
    inside = False
    for ring in rings:
        vs = ring.vertices
        for i in range(len(vs) - 1):
            y1, x1 = vs[i].lat_deg, vs[i].lng_deg
            y2, x2 = vs[i + 1].lat_deg, vs[i + 1].lng_deg
            if (y1 > y) != (y2 > y) and x < x1 + (y - y1) * (x2 - x1) / (y2 - y1):
                inside = not inside
    return inside


class SpatialIndex:
    """Immutable query structure over placemark representative points.

    A linear scan is deliberate: correctness is defined by brute-force
    oracle equivalence and the datasets are city-sized.
    """

    def __init__(self, entries: tuple[IndexEntry, ...]):
        self.entries = entries
        self._by_id = {e.placemark_id: e for e in entries}

    def __len__(self) -> int:
        return len(self.entries)

    def entry(self, placemark_id: str) -> IndexEntry | None:
        return self._by_id.get(placemark_id)

    def query_bbox(self, box: BBox) -> list[str]:
        """Placemark ids whose representative point lies in box (inclusive), document order."""
        return [e.placemark_id for e in self.entries if box.contains(e.point)]

    def query_nearest(self, p: GeoPoint, k: int) -> list[tuple[str, float]]:
        """The k nearest placemarks by haversine distance, ascending, ties by id."""
        if k < 1:
            raise ValueError(f"k must be >= 1, got {k}")
        ranked = sorted(
            ((haversine_distance_m(p, e.point), e.placemark_id) for e in self.entries),
        )
        return [(pid, dist) for dist, pid in ranked[:k]]

    def pick_at(self, p: GeoPoint, tol_deg: float = DEFAULT_PICK_TOLERANCE_DEG) -> PickResult | None:
        """Resolve a click: polygon interiors win, then nearest marker within tol_deg.

        Marker proximity is compared in planar lat/lng degrees; the reported
        distance_m is the haversine distance to the representative point.
        """
        if not tol_deg > 0:
            raise ValueError(f"tolerance must be positive, got {tol_deg}")
        interior = [e for e in self.entries
                    if e.polygon is not None and point_in_polygon(p, e.polygon)]
        if interior:
            hit = min(interior, key=lambda e: e.placemark_id)
            return PickResult(hit.placemark_id, 0.0, HIT_POLYGON_INTERIOR)
        best: IndexEntry | None = None
        best_key: tuple[float, str] | None = None
        for e in self.entries:
            d_deg = math.hypot(p.lat_deg - e.point.lat_deg, p.lng_deg - e.point.lng_deg)
            if d_deg <= tol_deg:
                key = (d_deg, e.placemark_id)
                if best_key is None or key < best_key:
                    best, best_key = e, key
        if best is None:
            return None
        return PickResult(best.placemark_id, haversine_distance_m(p, best.point), HIT_MARKER)


def build_index(d: Document) -> SpatialIndex:
    """Index every placemark that has geometry; polygons get their centroid."""
    entries = []
    for pm in d.placemarks:
        if isinstance(pm.geometry, GeoPoint):
            entries.append(IndexEntry(pm.id, pm.geometry, None))
        elif isinstance(pm.geometry, Polygon):
            entries.append(IndexEntry(pm.id, polygon_centroid(pm.geometry), pm.geometry))
    return SpatialIndex(tuple(entries))
