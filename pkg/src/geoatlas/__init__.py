"""geoatlas: self-hosted web GIS for a city's historical sites.

A KML-subset attribute database is parsed into an immutable Document,
indexed for spatial queries, and served over a small REST API that also
feeds a dual-pane (2D map + 2.5D scene) browser viewer kept in sync by an
echo-suppressed state machine.
"""

__version__ = "0.1.0"

from .geo import (
    BBox,
    DmsAngle,
    GeoPoint,
    decimal_to_dms,
    dms_to_decimal,
    format_dms,
    haversine_distance_m,
    normalize_longitude,
    parse_dms,
)
from .kml import (
    Document,
    LinearRing,
    ParseOptions,
    Placemark,
    Polygon,
    Style,
    ValidationIssue,
    get_attribute_text,
    load_document,
    parse_coordinate_string,
    parse_document,
    serialize_document,
    validate_document,
)
from .spatial import PickResult, SpatialIndex, build_index, point_in_polygon
from .viewsync import (
    LookAt,
    MapView,
    PaneEvent,
    SyncCommand,
    SyncState,
    apply_event,
    initial_state,
    lookat_to_mapview,
    mapview_to_lookat,
    range_from_zoom,
    zoom_from_range,
)

__all__ = [
    "BBox", "DmsAngle", "GeoPoint", "decimal_to_dms", "dms_to_decimal",
    "format_dms", "haversine_distance_m", "normalize_longitude", "parse_dms",
    "Document", "LinearRing", "ParseOptions", "Placemark", "Polygon", "Style",
    "ValidationIssue", "get_attribute_text", "load_document",
    "parse_coordinate_string", "parse_document", "serialize_document",
    "validate_document",
    "PickResult", "SpatialIndex", "build_index", "point_in_polygon",
    "LookAt", "MapView", "PaneEvent", "SyncCommand", "SyncState",
    "apply_event", "initial_state", "lookat_to_mapview", "mapview_to_lookat",
    "range_from_zoom", "zoom_from_range",
]
