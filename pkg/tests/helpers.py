"""Shared test utilities: random valid documents and independent oracles.

The oracles here are deliberately written against the Document, not the
SpatialIndex, so index queries are checked by a second route.
"""

from __future__ import annotations

import math
import random

from geoatlas import geo, kml

CITY_CENTER = (7.73687489, 4.43611944)


def q9(value: float) -> float:
    """Quantize to 9 decimals, the canonical serializer precision."""
    return round(value, 9)


def random_point(rng: random.Random, lat_span: float = 88.0,
                 lng_span: float = 178.0, with_alt: bool = False) -> geo.GeoPoint:
    lat = q9(rng.uniform(-lat_span, lat_span))
    lng = q9(rng.uniform(-lng_span, lng_span))
    alt = q9(rng.uniform(1.0, 500.0)) if with_alt and rng.random() < 0.5 else 0.0
    return geo.GeoPoint(lat, lng, alt)


def random_ring(rng: random.Random, center: geo.GeoPoint | None = None,
                max_radius_deg: float = 0.01) -> kml.LinearRing:
    """Convex ring: sorted angles around a center, closed exactly."""
    if center is None:
        center = random_point(rng, lat_span=85.0, lng_span=175.0)
    n = rng.randint(3, 8)
    radius = rng.uniform(max_radius_deg / 10.0, max_radius_deg)
    angles = sorted(rng.uniform(0.0, 2.0 * math.pi) for _ in range(n))
    vertices = []
    for a in angles:
        vertices.append(geo.GeoPoint(q9(center.lat_deg + radius * math.sin(a)),
                                     q9(center.lng_deg + radius * math.cos(a))))
    if len({(v.lat_deg, v.lng_deg) for v in vertices}) < 3:
        return random_ring(rng, center, max_radius_deg)
    vertices.append(vertices[0])
    return kml.LinearRing(tuple(vertices))


def random_polygon(rng: random.Random, center: geo.GeoPoint | None = None) -> kml.Polygon:
    outer = random_ring(rng, center)
    inners = ()
    if rng.random() < 0.2:
        # A small ring near the outer's centroid; fine if it pokes outside,
        # even-odd semantics stay well defined.
        seen = {(v.lat_deg, v.lng_deg) for v in outer.vertices}
        clat = sum(lat for lat, _ in seen) / len(seen)
        clng = sum(lng for _, lng in seen) / len(seen)
        inners = (random_ring(rng, geo.GeoPoint(q9(clat), q9(clng)), 0.001),)
    return kml.Polygon(outer=outer, inners=inners, tessellate=rng.random() < 0.5)


_NAME_WORDS = ["Town", "Hall", "Palace", "Mosque", "Church", "Market", "Shrine",
               "Gate", "Court", "House", "Old", "Royal", "Ancient", "Heritage"]
_DESCRIPTIONS = ["", "A heritage site.", "Restored in 1950 & open daily.",
                 "Footprint digitized from survey sheets <1960>."]


def random_document(rng: random.Random, max_placemarks: int = 6) -> kml.Document:
    """A canonical Document: unique ids, resolvable styles, normalized text,
    coordinates on the 9-decimal grid. Round-trips with zero issues."""
    styles: dict[str, kml.Style] = {}
    for i in range(rng.randint(0, 3)):
        sid = f"style-{i}"
        styles[sid] = kml.Style(
            sid,
            icon_hint=rng.choice(["pushpin", "flag", ""]),
            color_hint=rng.choice(["ff00ffff", "80ffaa00", ""]),
        )
    placemarks = []
    for i in range(rng.randint(0, max_placemarks)):
        name = " ".join(rng.choice(_NAME_WORDS) for _ in range(rng.randint(1, 4)))
        if rng.random() < 0.7:
            geometry: geo.GeoPoint | kml.Polygon = random_point(rng, with_alt=True)
        else:
            geometry = random_polygon(rng)
        style_ref = f"#{rng.choice(sorted(styles))}" if styles and rng.random() < 0.6 else None
        placemarks.append(kml.Placemark(
            id=f"pm{i}",
            name=name,
            geometry=geometry,
            description=rng.choice(_DESCRIPTIONS),
            style_ref=style_ref,
            attributes=(("name", name),),
        ))
    return kml.Document(placemarks=tuple(placemarks), styles=styles)


# ---------------------------------------------------------------------------
# Brute-force oracles


def oracle_representative_point(pm: kml.Placemark) -> geo.GeoPoint | None:
    """Independent recomputation of a placemark's representative point."""
    if isinstance(pm.geometry, geo.GeoPoint):
        return pm.geometry
    if isinstance(pm.geometry, kml.Polygon):
        distinct = []
        for v in pm.geometry.outer.vertices:
            if (v.lat_deg, v.lng_deg) not in [(d.lat_deg, d.lng_deg) for d in distinct]:
                distinct.append(v)
        return geo.GeoPoint(sum(v.lat_deg for v in distinct) / len(distinct),
                            sum(v.lng_deg for v in distinct) / len(distinct))
    return None


def oracle_bbox_ids(document: kml.Document, box: geo.BBox) -> list[str]:
    out = []
    for pm in document.placemarks:
        p = oracle_representative_point(pm)
        if p is not None and box.contains(p):
            out.append(pm.id)
    return out


def oracle_nearest(document: kml.Document, probe: geo.GeoPoint, k: int) -> list[tuple[str, float]]:
    rows = []
    for pm in document.placemarks:
        p = oracle_representative_point(pm)
        if p is not None:
            rows.append((geo.haversine_distance_m(probe, p), pm.id))
    rows.sort()
    return [(pid, dist) for dist, pid in rows[:k]]


def _is_left(x1: float, y1: float, x2: float, y2: float, x: float, y: float) -> float:
    return (x2 - x1) * (y - y1) - (x - x1) * (y2 - y1)


def oracle_winding_inside(p: geo.GeoPoint, rings: list[kml.LinearRing]) -> bool:
    """Winding-number containment (nonzero within each ring, even-odd across
    rings via xor, matching hole subtraction for non-overlapping rings)."""
    inside = False
    x, y = p.lng_deg, p.lat_deg
    for ring in rings:
        wn = 0
        vs = ring.vertices
        for i in range(len(vs) - 1):
            x1, y1 = vs[i].lng_deg, vs[i].lat_deg
            x2, y2 = vs[i + 1].lng_deg, vs[i + 1].lat_deg
            if y1 <= y:
                if y2 > y and _is_left(x1, y1, x2, y2, x, y) > 0:
                    wn += 1
            elif y2 <= y and _is_left(x1, y1, x2, y2, x, y) < 0:
                wn -= 1
        if wn != 0:
            inside = not inside
    return inside


def point_near_ring_boundary(p: geo.GeoPoint, rings, eps: float = 1e-9) -> bool:
    """True when p is within eps of any edge (oracle comparisons skip these)."""
    x, y = p.lng_deg, p.lat_deg
    for ring in rings:
        vs = ring.vertices
        for i in range(len(vs) - 1):
            x1, y1 = vs[i].lng_deg, vs[i].lat_deg
            x2, y2 = vs[i + 1].lng_deg, vs[i + 1].lat_deg
            dx, dy = x2 - x1, y2 - y1
            length_sq = dx * dx + dy * dy
            if length_sq == 0.0:
                t = 0.0
            else:
                t = max(0.0, min(1.0, ((x - x1) * dx + (y - y1) * dy) / length_sq))
            if math.hypot(x - (x1 + t * dx), y - (y1 + t * dy)) < eps:
                return True
    return False
