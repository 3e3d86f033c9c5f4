"""REST tier: loads the attribute database, owns the spatial index, and
answers placemark/attribute/view-conversion requests plus the static viewer.

All endpoints are read-only; the whole AppState is swapped atomically on
reload so a request never sees a half-loaded dataset.
"""

from __future__ import annotations

import json
import logging
import threading
import time
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, unquote, urlparse

from . import kml, spatial, viewsync
from .geo import BBox, GeoPoint, InvalidBBoxError, InvalidCoordinateError

log = logging.getLogger("geoatlas.server")

PACKAGE_DIR = Path(__file__).resolve().parent
DEFAULT_STATIC_DIR = PACKAGE_DIR / "static"
BUNDLED_DATA_PATH = PACKAGE_DIR / "data" / "ede_sample.kml"
# The bundled sample mirrors the legacy attribute files' lat,lon tuple order.
BUNDLED_PARSE_OPTIONS = kml.ParseOptions(axis_order=kml.AXIS_LAT_LON)

SUMMARY_NAME_LIMIT = 80

_CONTENT_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".js": "application/javascript; charset=utf-8",
    ".json": "application/json; charset=utf-8",
    ".kml": kml.MEDIA_TYPE_KML,
    ".png": "image/png",
    ".svg": "image/svg+xml",
    ".ico": "image/x-icon",
}


class BadRequestError(ValueError):
    code = "BAD_REQUEST"


class NotFoundError(KeyError):
    code = "NOT_FOUND"


class DataLoadError(Exception):
    """Dataset could not be loaded. code is FILE_NOT_FOUND or PARSE_FAILED;
    issue_code carries the parse rule that failed, when there is one."""

    def __init__(self, code: str, message: str, issue_code: str | None = None):
        super().__init__(message)
        self.code = code
        self.issue_code = issue_code


@dataclass(frozen=True)
class AppState:
    document: kml.Document
    index: spatial.SpatialIndex
    started_at: float
    data_path: str
    parse_options: kml.ParseOptions


def load_state(data_path: str | Path, opts: kml.ParseOptions | None = None) -> AppState:
    """Parse the data file and build the index; strict parse errors abort."""
    opts = opts or kml.ParseOptions()
    path = Path(data_path)
    if not path.is_file():
        raise DataLoadError("FILE_NOT_FOUND", f"data file not found: {path}")
    try:
        document, issues = kml.load_document(path, opts)
    except OSError as e:
        raise DataLoadError("FILE_NOT_FOUND", f"cannot read {path}: {e}") from e
    except kml.MalformedXmlError as e:
        raise DataLoadError("PARSE_FAILED", f"{path}: {e}", issue_code=e.code) from e
    except kml.StrictParseError as e:
        raise DataLoadError("PARSE_FAILED", f"{path}: {e}", issue_code=e.code) from e
    for issue in issues:
        log.warning("%s %s placemark=%s: %s", issue.severity.upper(), issue.code,
                    issue.placemark_id or "-", issue.message)
    return AppState(
        document=document,
        index=spatial.build_index(document),
        started_at=time.time(),
        data_path=str(path),
        parse_options=opts,
    )


# ---------------------------------------------------------------------------
# Endpoint logic (pure functions of state + request)


def parse_bbox_param(raw: str) -> BBox:
    """Query-string box "minLng,minLat,maxLng,maxLat" -> BBox."""
    parts = raw.split(",")
    if len(parts) != 4:
        raise BadRequestError(f"bbox needs 4 comma-separated numbers, got {raw!r}")
    try:
        min_lng, min_lat, max_lng, max_lat = (float(p) for p in parts)
    except ValueError:
        raise BadRequestError(f"bbox components must be numbers: {raw!r}") from None
    try:
        return BBox(GeoPoint(min_lat, min_lng), GeoPoint(max_lat, max_lng))
    except (InvalidCoordinateError, InvalidBBoxError) as e:
        raise BadRequestError(str(e)) from None


def list_placemarks(state: AppState, box: BBox | None = None) -> list[dict]:
    """Summaries in document order, names truncated for dropdown display."""
    names = {pm.id: pm.name for pm in state.document.placemarks}
    wanted = None if box is None else set(state.index.query_bbox(box))
    out = []
    for entry in state.index.entries:
        if wanted is not None and entry.placemark_id not in wanted:
            continue
        out.append({
            "id": entry.placemark_id,
            "name": names.get(entry.placemark_id, "")[:SUMMARY_NAME_LIMIT],
            "lat": entry.point.lat_deg,
            "lng": entry.point.lng_deg,
        })
    return out


def _geometry_json(geometry: GeoPoint | kml.Polygon | None) -> dict | None:
    if isinstance(geometry, GeoPoint):
        return {"type": "point", "lat": geometry.lat_deg, "lng": geometry.lng_deg,
                "alt_m": geometry.alt_m}
    if isinstance(geometry, kml.Polygon):
        def ring(r: kml.LinearRing) -> list[dict]:
            return [{"lat": v.lat_deg, "lng": v.lng_deg} for v in r.vertices]
        return {"type": "polygon", "outer": ring(geometry.outer),
                "inners": [ring(r) for r in geometry.inners],
                "tessellate": geometry.tessellate}
    return None


def get_placemark(state: AppState, placemark_id: str) -> dict:
    for pm in state.document.placemarks:
        if pm.id == placemark_id:
            extrude = (pm.geometry.extrude_height_m
                       if isinstance(pm.geometry, kml.Polygon) else None)
            return {
                "id": pm.id,
                "name": pm.name,
                "description": pm.description,
                "style_ref": pm.style_ref,
                "geometry": _geometry_json(pm.geometry),
                "extrude_height_m": extrude,
                "attributes": [{"key": k, "value": v} for k, v in pm.attributes],
            }
    raise NotFoundError(f"no placemark {placemark_id!r}")


def get_attributes(state: AppState, placemark_id: str) -> dict:
    try:
        pairs = kml.get_attribute_text(state.document, placemark_id)
    except kml.PlacemarkNotFoundError:
        raise NotFoundError(f"no placemark {placemark_id!r}") from None
    return {"id": placemark_id, "attributes": [{"key": k, "value": v} for k, v in pairs]}


def search_nearest(state: AppState, lat: str, lng: str, k: str) -> list[dict]:
    try:
        point = GeoPoint(float(lat), float(lng))
    except (TypeError, ValueError) as e:
        raise BadRequestError(f"bad lat/lng: {e}") from None
    try:
        count = int(k)
    except (TypeError, ValueError):
        raise BadRequestError(f"k must be an integer, got {k!r}") from None
    if count < 1:
        raise BadRequestError(f"k must be >= 1, got {count}")
    return [{"id": pid, "distance_m": dist}
            for pid, dist in state.index.query_nearest(point, count)]


def export_kml(state: AppState) -> str:
    return kml.serialize_document(state.document)


def convert_view(state: AppState, payload: dict) -> dict:
    """Cross-check endpoint: run the authoritative view conversion."""
    try:
        direction = payload["direction"]
        view = payload["view"]
        if direction == "to-mapview":
            return viewsync.mapview_json(
                viewsync.lookat_to_mapview(viewsync.lookat_from_json(view)))
        if direction == "to-lookat":
            return viewsync.lookat_json(
                viewsync.mapview_to_lookat(viewsync.mapview_from_json(view)))
        raise BadRequestError(f"direction must be to-mapview or to-lookat, got {direction!r}")
    except BadRequestError:
        raise
    except (KeyError, TypeError, ValueError) as e:
        raise BadRequestError(f"malformed view payload: {e}") from None


def fixtures_json(state: AppState) -> dict:
    points = {e.placemark_id: e.point for e in state.index.entries}
    return viewsync.fixture_document(points)


# ---------------------------------------------------------------------------
# HTTP layer


@dataclass
class HttpResponse:
    status: int
    content_type: str
    body: bytes


def _json_response(obj, status: int = 200) -> HttpResponse:
    return HttpResponse(status, "application/json; charset=utf-8",
                        json.dumps(obj).encode("utf-8"))


def _error_response(status: int, code: str, message: str) -> HttpResponse:
    return _json_response({"error": {"code": code, "message": message}}, status)


class Application:
    """Holds the swappable AppState plus server configuration."""

    def __init__(self, data_path: str | Path, parse_options: kml.ParseOptions | None = None,
                 static_dir: str | Path | None = None):
        self.data_path = str(data_path)
        self.parse_options = parse_options or kml.ParseOptions()
        self.static_dir = Path(static_dir) if static_dir else DEFAULT_STATIC_DIR
        self._lock = threading.Lock()
        self._state = load_state(self.data_path, self.parse_options)

    @property
    def state(self) -> AppState:
        with self._lock:
            return self._state

    def reload(self) -> AppState:
        """Rebuild state off to the side, then swap; failure keeps the old state."""
        new_state = load_state(self.data_path, self.parse_options)
        with self._lock:
            self._state = new_state
        log.info("reloaded %s (%d placemarks)", self.data_path,
                 len(new_state.document.placemarks))
        return new_state


def _serve_static(app: Application, path: str) -> HttpResponse:
    base = app.static_dir.resolve()
    relative = path.lstrip("/") or "index.html"
    target = (base / relative).resolve()
    if base != target and base not in target.parents:
        return _error_response(404, "NOT_FOUND", "no such path")
    if target.is_dir():
        target = target / "index.html"
    if not target.is_file():
        return _error_response(404, "NOT_FOUND", f"no such path: {path}")
    content_type = _CONTENT_TYPES.get(target.suffix.lower(), "application/octet-stream")
    return HttpResponse(200, content_type, target.read_bytes())


def handle_request(app: Application, method: str, path: str,
                   query: dict[str, str], body: bytes = b"") -> HttpResponse:
    """Route one request against the current state snapshot."""
    state = app.state
    try:
        if path == "/healthz" and method == "GET":
            return _json_response({"status": "ok"})
        if path == "/api/placemarks" and method == "GET":
            box = parse_bbox_param(query["bbox"]) if "bbox" in query else None
            return _json_response(list_placemarks(state, box))
        if path.startswith("/api/placemarks/") and method == "GET":
            rest = path[len("/api/placemarks/"):]
            if rest.endswith("/attributes"):
                placemark_id = unquote(rest[:-len("/attributes")])
                return _json_response(get_attributes(state, placemark_id))
            if "/" not in rest:
                return _json_response(get_placemark(state, unquote(rest)))
        if path == "/api/nearest" and method == "GET":
            return _json_response(search_nearest(
                state, query.get("lat", ""), query.get("lng", ""), query.get("k", "")))
        if path == "/api/document.kml" and method == "GET":
            return HttpResponse(200, kml.MEDIA_TYPE_KML, export_kml(state).encode("utf-8"))
        if path == "/api/viewsync/convert" and method == "POST":
            try:
                payload = json.loads(body.decode("utf-8"))
            except (UnicodeDecodeError, json.JSONDecodeError) as e:
                raise BadRequestError(f"body must be JSON: {e}") from None
            if not isinstance(payload, dict):
                raise BadRequestError("body must be a JSON object")
            return _json_response(convert_view(state, payload))
        if path == "/api/fixtures" and method == "GET":
            return _json_response(fixtures_json(state))
        if method == "GET" and not path.startswith("/api/"):
            return _serve_static(app, path)
        return _error_response(404, "NOT_FOUND", f"no route for {method} {path}")
    except BadRequestError as e:
        return _error_response(400, e.code, str(e))
    except NotFoundError as e:
        return _error_response(404, e.code, str(e.args[0]) if e.args else "not found")
    except Exception:  # handler bugs must never leak a traceback to clients
        log.exception("internal error handling %s %s", method, path)
        return _error_response(500, "INTERNAL", "internal server error")


class _Handler(BaseHTTPRequestHandler):
    server: "GeoAtlasServer"

    def _dispatch(self, method: str) -> None:
        started = time.perf_counter()
        try:
            parsed = urlparse(self.path)
            query = {k: values[-1] for k, values in
                     parse_qs(parsed.query, keep_blank_values=True).items()}
            body = b""
            try:
                length = int(self.headers.get("Content-Length") or 0)
            except ValueError:
                length = 0
            if length > 0:
                body = self.rfile.read(length)
            response = handle_request(self.server.app, method, parsed.path, query, body)
        except Exception:
            log.exception("request plumbing failed for %s %s", method, self.path)
            response = _error_response(500, "INTERNAL", "internal server error")
        try:
            self.send_response(response.status)
            self.send_header("Content-Type", response.content_type)
            self.send_header("Content-Length", str(len(response.body)))
            self.end_headers()
            self.wfile.write(response.body)
        except (BrokenPipeError, ConnectionResetError):
            pass
        elapsed_ms = (time.perf_counter() - started) * 1000.0
        log.info("%s %s %d %.1fms", method, self.path, response.status, elapsed_ms)

    def do_GET(self) -> None:
        self._dispatch("GET")

    def do_POST(self) -> None:
        self._dispatch("POST")

    def log_message(self, fmt, *args):  # request logging handled in _dispatch
        pass


class GeoAtlasServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, address: tuple[str, int], app: Application):
        super().__init__(address, _Handler)
        self.app = app


def create_server(app: Application, host: str = "127.0.0.1", port: int = 8080) -> GeoAtlasServer:
    """Bind the server socket; OSError propagates on an occupied port."""
    return GeoAtlasServer((host, port), app)
