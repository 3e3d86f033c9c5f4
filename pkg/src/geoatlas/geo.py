"""Geodetic primitives: coordinates, DMS conversion, great-circle distance, bounding boxes."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

# Spherical earth model. City-scale distances do not warrant an ellipsoid.
EARTH_RADIUS_M = 6_371_000.0

_LAT_HEMISPHERES = "NS"
_LNG_HEMISPHERES = "EW"


class InvalidDmsError(ValueError):
    """A DMS angle has an out-of-range or inconsistent component."""

    code = "INVALID_DMS"


class InvalidCoordinateError(ValueError):
    """A decimal coordinate is non-finite or outside its axis range."""

    code = "INVALID_COORDINATE"


class InvalidBBoxError(ValueError):
    """A bounding box is inverted or crosses the antimeridian."""

    code = "INVALID_BBOX"


@dataclass(frozen=True)
class DmsAngle:
    """Sexagesimal angle with a hemisphere letter, e.g. 7°44'12.75" N.

    The hemisphere letter is authoritative for sign; degrees/minutes/seconds
    are magnitudes and must be non-negative.
    """

    degrees: int
    minutes: int
    seconds: float
    hemisphere: str

    def __post_init__(self) -> None:
        if self.hemisphere not in "NSEW":
            raise InvalidDmsError(f"unknown hemisphere {self.hemisphere!r}")
        if self.degrees < 0 or self.minutes < 0 or self.seconds < 0:
            raise InvalidDmsError("DMS components must be non-negative")
        if self.minutes >= 60:
            raise InvalidDmsError(f"minutes out of range: {self.minutes}")
        if self.seconds >= 60:
            raise InvalidDmsError(f"seconds out of range: {self.seconds}")
        limit = 90.0 if self.hemisphere in _LAT_HEMISPHERES else 180.0
        magnitude = self.degrees + self.minutes / 60.0 + self.seconds / 3600.0
        if magnitude > limit:
            raise InvalidDmsError(
                f"angle {magnitude:.7f} exceeds {limit:g} for hemisphere {self.hemisphere}"
            )


@dataclass(frozen=True)
class GeoPoint:
    """Geodetic position in decimal degrees, altitude in meters."""

    lat_deg: float
    lng_deg: float
    alt_m: float = 0.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.lat_deg) and math.isfinite(self.lng_deg)):
            raise InvalidCoordinateError("coordinates must be finite")
        if not -90.0 <= self.lat_deg <= 90.0:
            raise InvalidCoordinateError(f"latitude out of range: {self.lat_deg}")
        if not -180.0 <= self.lng_deg <= 180.0:
            raise InvalidCoordinateError(f"longitude out of range: {self.lng_deg}")


@dataclass(frozen=True)
class BBox:
    """Axis-aligned lat/lng box, boundary inclusive. Altitude is ignored.

    Boxes crossing the antimeridian are rejected rather than split; the
    datasets this serves are nowhere near ±180°.
    """

    min: GeoPoint
    max: GeoPoint

    def __post_init__(self) -> None:
        if self.min.lat_deg > self.max.lat_deg or self.min.lng_deg > self.max.lng_deg:
            raise InvalidBBoxError(
                f"min corner ({self.min.lat_deg}, {self.min.lng_deg}) exceeds "
                f"max corner ({self.max.lat_deg}, {self.max.lng_deg})"
            )

    def contains(self, p: GeoPoint) -> bool:
        return (
            self.min.lat_deg <= p.lat_deg <= self.max.lat_deg
            and self.min.lng_deg <= p.lng_deg <= self.max.lng_deg
        )


def dms_to_decimal(a: DmsAngle) -> float:
    """Signed decimal degrees for a DMS angle (+ for N/E, − for S/W)."""
    magnitude = a.degrees + a.minutes / 60.0 + a.seconds / 3600.0
    return -magnitude if a.hemisphere in "SW" else magnitude


def decimal_to_dms(deg: float, axis: str) -> DmsAngle:
    """Convert signed decimal degrees to DMS on the given axis ("lat" or "lng").

    The inverse of dms_to_decimal to within 1e-9°; seconds keep full float
    precision here and are rounded to 2 decimals only for display.
    """
    if axis not in ("lat", "lng"):
        raise ValueError(f"axis must be 'lat' or 'lng', got {axis!r}")
    if not math.isfinite(deg):
        raise InvalidCoordinateError("angle must be finite")
    limit = 90.0 if axis == "lat" else 180.0
    if abs(deg) > limit:
        raise InvalidCoordinateError(f"{axis} out of range: {deg}")
    hemispheres = _LAT_HEMISPHERES if axis == "lat" else _LNG_HEMISPHERES
    hemisphere = hemispheres[0] if deg >= 0 else hemispheres[1]
    magnitude = abs(deg)
    degrees = int(magnitude)
    rem_minutes = (magnitude - degrees) * 60.0
    minutes = int(rem_minutes)
    seconds = (rem_minutes - minutes) * 60.0
    # Float rounding can push seconds to exactly 60; carry upward.
    if seconds >= 60.0:
        seconds = 0.0
        minutes += 1
    if minutes >= 60:
        minutes = 0
        degrees += 1
    return DmsAngle(degrees, minutes, seconds, hemisphere)


def format_dms(a: DmsAngle) -> str:
    """Render as D°M'S.SS" H with seconds shown to 2 decimal places."""
    degrees, minutes, seconds = a.degrees, a.minutes, a.seconds
    if round(seconds, 2) >= 60.0:  # display rounding may carry
        seconds = 0.0
        minutes += 1
        if minutes >= 60:
            minutes = 0
            degrees += 1
    return f"{degrees}°{minutes}'{seconds:.2f}\" {a.hemisphere}"


_DMS_RE = re.compile(
    r"""^\s*(\d+)\s*(?:°|d)\s*(\d+)\s*(?:'|m)\s*(\d+(?:\.\d+)?)\s*(?:"|s)\s*([NSEW])\s*$""",
    re.IGNORECASE,
)


def parse_dms(text: str) -> DmsAngle:
    """Parse the textual form D°M'S.SS"H (ASCII fallbacks d/m/s accepted).

    A leading minus sign is rejected: the hemisphere letter alone carries
    the sign.
    """
    if text.lstrip().startswith("-"):
        raise InvalidDmsError("sign comes from the hemisphere letter, not a minus")
    m = _DMS_RE.match(text)
    if not m:
        raise InvalidDmsError(f"not a DMS angle: {text!r}")
    return DmsAngle(int(m.group(1)), int(m.group(2)), float(m.group(3)), m.group(4).upper())


def haversine_distance_m(a: GeoPoint, b: GeoPoint) -> float:
    """Great-circle distance in meters on the spherical earth model."""
    phi1 = math.radians(a.lat_deg)
    phi2 = math.radians(b.lat_deg)
    dphi = math.radians(b.lat_deg - a.lat_deg)
    dlam = math.radians(b.lng_deg - a.lng_deg)
    h = math.sin(dphi / 2.0) ** 2 + math.cos(phi1) * math.cos(phi2) * math.sin(dlam / 2.0) ** 2
    return EARTH_RADIUS_M * 2.0 * math.atan2(math.sqrt(h), math.sqrt(1.0 - h))


def normalize_longitude(lng: float) -> float:
    """Wrap a longitude into [-180, 180)."""
    if not math.isfinite(lng):
        raise InvalidCoordinateError(f"longitude must be finite, got {lng!r}")
    if -180.0 <= lng < 180.0:
        return lng
    result = (lng + 180.0) % 360.0 - 180.0
    if result >= 180.0:  # guard against % rounding at the boundary
        result -= 360.0
    return result
