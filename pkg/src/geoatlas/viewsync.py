"""Dual-pane view synchronization: 3D camera <-> 2D map conversion and the
echo-suppressed event state machine that keeps the two panes superimposed.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, replace
from typing import Mapping

from .geo import GeoPoint

PANE_2D = "pane-2d"
PANE_3D = "pane-3d"
ORIGIN_DROPDOWN = "dropdown"

ALTITUDE_RELATIVE_TO_GROUND = "relative-to-ground"
ALTITUDE_ABSOLUTE = "absolute"

ZOOM_MIN = 0
ZOOM_MAX = 21

# Ground-range ladder anchored at zoom 1; halving the range steps the zoom
# up by one, which makes the zoom<->range round trip exact.
RANGE_AT_ZOOM_1_M = 591_657_550.5

# Camera defaults for the 2.5D pane: altitude 10 m above ground, heading 5°,
# tilt 70°, range 300 m.
DEFAULT_ALTITUDE_M = 10.0
DEFAULT_HEADING_DEG = 5.0
DEFAULT_TILT_DEG = 70.0
DEFAULT_RANGE_M = 300.0

# Initial 2D view of the bundled city center dataset.
DEFAULT_CENTER = GeoPoint(7.73687489, 4.43611944)
INITIAL_2D_ZOOM = 2

# Dropdown selection jumps to a city-block scale.
SELECT_ZOOM = 18

EVENT_CLICK = "click"
EVENT_SELECT = "select"
EVENT_CAMERA_CHANGED = "camera-changed"


class NonpositiveRangeError(ValueError):
    code = "NONPOSITIVE_RANGE"


class ZoomOutOfRangeError(ValueError):
    code = "ZOOM_OUT_OF_RANGE"


class UnknownPlacemarkError(KeyError):
    code = "UNKNOWN_PLACEMARK"


@dataclass(frozen=True)
class LookAt:
    """3D camera: target point plus orientation and camera-to-target range."""

    target: GeoPoint
    altitude_m: float = DEFAULT_ALTITUDE_M
    altitude_mode: str = ALTITUDE_RELATIVE_TO_GROUND
    heading_deg: float = DEFAULT_HEADING_DEG
    tilt_deg: float = DEFAULT_TILT_DEG
    range_m: float = DEFAULT_RANGE_M

    def __post_init__(self) -> None:
        if self.altitude_mode not in (ALTITUDE_RELATIVE_TO_GROUND, ALTITUDE_ABSOLUTE):
            raise ValueError(f"unknown altitude mode {self.altitude_mode!r}")
        if not (math.isfinite(self.range_m) and self.range_m > 0):
            raise NonpositiveRangeError(f"range must be positive, got {self.range_m}")
        if not 0.0 <= self.tilt_deg <= 90.0:
            raise ValueError(f"tilt out of [0,90]: {self.tilt_deg}")
        if not 0.0 <= self.heading_deg < 360.0:
            object.__setattr__(self, "heading_deg", self.heading_deg % 360.0)


@dataclass(frozen=True)
class MapView:
    """2D map state: center plus integer zoom level."""

    center: GeoPoint
    zoom: int

    def __post_init__(self) -> None:
        if not isinstance(self.zoom, int) or not ZOOM_MIN <= self.zoom <= ZOOM_MAX:
            raise ZoomOutOfRangeError(f"zoom out of [{ZOOM_MIN},{ZOOM_MAX}]: {self.zoom}")


@dataclass(frozen=True)
class PaneEvent:
    """One input to the sync machine.

    click carries point+pane origin; select carries placemark_id with
    dropdown origin; camera-changed carries the pane's reported view and
    the epoch of the command that caused it (or a fresh epoch when the
    user moved the pane directly).
    """

    kind: str
    origin: str
    point: GeoPoint | None = None
    placemark_id: str | None = None
    view: MapView | LookAt | None = None
    epoch: int | None = None

    def __post_init__(self) -> None:
        if self.kind == EVENT_CLICK:
            if self.origin not in (PANE_2D, PANE_3D) or self.point is None:
                raise ValueError("click needs a pane origin and a point")
        elif self.kind == EVENT_SELECT:
            if self.origin != ORIGIN_DROPDOWN or not self.placemark_id:
                raise ValueError("select needs dropdown origin and a placemark id")
        elif self.kind == EVENT_CAMERA_CHANGED:
            if self.origin == PANE_2D and not isinstance(self.view, MapView):
                raise ValueError("camera-changed from pane-2d must carry a MapView")
            if self.origin == PANE_3D and not isinstance(self.view, LookAt):
                raise ValueError("camera-changed from pane-3d must carry a LookAt")
            if self.origin == ORIGIN_DROPDOWN:
                raise ValueError("camera-changed cannot originate from the dropdown")
            if self.epoch is None or self.epoch < 0:
                raise ValueError("camera-changed needs a non-negative epoch")
        else:
            raise ValueError(f"unknown event kind {self.kind!r}")


@dataclass(frozen=True)
class SyncCommand:
    target_pane: str
    view: MapView | LookAt
    epoch: int


@dataclass(frozen=True)
class SyncState:
    epoch: int
    view_2d: MapView
    view_3d: LookAt


def zoom_from_range(range_m: float) -> int:
    """Integer zoom for a camera range: clamp(round(1 + log2(K / range)), 0, 21)."""
    if not (isinstance(range_m, (int, float)) and math.isfinite(range_m) and range_m > 0):
        raise NonpositiveRangeError(f"range must be a positive number, got {range_m!r}")
    return int(min(ZOOM_MAX, max(ZOOM_MIN, round(1 + math.log2(RANGE_AT_ZOOM_1_M / range_m)))))


def range_from_zoom(zoom: int) -> float:
    """Camera range for an integer zoom: K / 2^(zoom-1). Exact inverse of zoom_from_range."""
    if not isinstance(zoom, int) or not ZOOM_MIN <= zoom <= ZOOM_MAX:
        raise ZoomOutOfRangeError(f"zoom out of [{ZOOM_MIN},{ZOOM_MAX}]: {zoom!r}")
    return RANGE_AT_ZOOM_1_M / 2.0 ** (zoom - 1)


def lookat_to_mapview(la: LookAt) -> MapView:
    """Project the 3D camera onto the 2D pane; lat/lng pass through bit-for-bit."""
    center = GeoPoint(la.target.lat_deg, la.target.lng_deg)
    return MapView(center=center, zoom=zoom_from_range(la.range_m))


def mapview_to_lookat(mv: MapView) -> LookAt:
    """Lift the 2D view to a 3D camera with the default orientation."""
    target = GeoPoint(mv.center.lat_deg, mv.center.lng_deg)
    return LookAt(target=target, range_m=range_from_zoom(mv.zoom))


def initial_state(center: GeoPoint = DEFAULT_CENTER) -> SyncState:
    """Start-up state. The 2D zoom and 3D range are independent initial
    values and may disagree until the first user event."""
    return SyncState(
        epoch=0,
        view_2d=MapView(center=center, zoom=INITIAL_2D_ZOOM),
        view_3d=LookAt(target=center),
    )


def _recenter(state: SyncState, p: GeoPoint, epoch: int,
              zoom: int | None = None, range_m: float | None = None,
              ) -> tuple[SyncState, list[SyncCommand]]:
    center = GeoPoint(p.lat_deg, p.lng_deg)
    view_2d = MapView(center=center, zoom=state.view_2d.zoom if zoom is None else zoom)
    view_3d = replace(state.view_3d, target=center,
                      range_m=state.view_3d.range_m if range_m is None else range_m)
    commands = [
        SyncCommand(PANE_2D, view_2d, epoch),
        SyncCommand(PANE_3D, view_3d, epoch),
    ]
    return SyncState(epoch, view_2d, view_3d), commands


def apply_event(state: SyncState, event: PaneEvent,
                placemark_points: Mapping[str, GeoPoint] | None = None,
                ) -> tuple[SyncState, list[SyncCommand]]:
    """Advance the sync machine by one event.

    Clicks recenter both panes at unchanged scale; dropdown selection
    recenters at city-block scale; a pane's own echo of a command (epoch
    <= current) only refreshes that pane's recorded view; a user-originated
    camera change (fresh epoch) is adopted and mirrored to the other pane.
    """
    if event.kind == EVENT_CLICK:
        return _recenter(state, event.point, state.epoch + 1)

    if event.kind == EVENT_SELECT:
        if placemark_points is None or event.placemark_id not in placemark_points:
            raise UnknownPlacemarkError(event.placemark_id)
        target = placemark_points[event.placemark_id]
        return _recenter(state, target, state.epoch + 1,
                         zoom=SELECT_ZOOM, range_m=range_from_zoom(SELECT_ZOOM))

    # camera-changed
    if event.epoch <= state.epoch:
        # Echo of our own command: record it, emit nothing.
        if event.origin == PANE_2D:
            return replace(state, view_2d=event.view), []
        return replace(state, view_3d=event.view), []

    if event.origin == PANE_2D:
        view_2d = event.view
        view_3d = mapview_to_lookat(view_2d)
        commands = [SyncCommand(PANE_3D, view_3d, event.epoch)]
    else:
        view_3d = event.view
        view_2d = lookat_to_mapview(view_3d)
        commands = [SyncCommand(PANE_2D, view_2d, event.epoch)]
    return SyncState(event.epoch, view_2d, view_3d), commands


def echo_of(command: SyncCommand) -> PaneEvent:
    """The camera-changed event a pane reports after applying a command."""
    return PaneEvent(kind=EVENT_CAMERA_CHANGED, origin=command.target_pane,
                     view=command.view, epoch=command.epoch)


# ---------------------------------------------------------------------------
# Fixture vectors (shared with the browser client's test suite)

# Seed for the randomized event traces in the fixture document; fixed so
# fixture output is byte-identical across runs and builds.
FIXTURE_TRACE_SEED = 7442

_FIXTURE_TRACES = 6
_FIXTURE_TRACE_EVENTS = 14


def geopoint_json(p: GeoPoint) -> dict:
    out = {"lat": p.lat_deg, "lng": p.lng_deg}
    if p.alt_m:
        out["alt_m"] = p.alt_m
    return out


def mapview_json(mv: MapView) -> dict:
    return {"center": {"lat": mv.center.lat_deg, "lng": mv.center.lng_deg}, "zoom": mv.zoom}


def lookat_json(la: LookAt) -> dict:
    return {
        "target": {"lat": la.target.lat_deg, "lng": la.target.lng_deg, "alt_m": la.target.alt_m},
        "altitude_m": la.altitude_m,
        "altitude_mode": la.altitude_mode,
        "heading_deg": la.heading_deg,
        "tilt_deg": la.tilt_deg,
        "range_m": la.range_m,
    }


def view_json(view: MapView | LookAt) -> dict:
    return mapview_json(view) if isinstance(view, MapView) else lookat_json(view)


def mapview_from_json(obj: dict) -> MapView:
    return MapView(center=GeoPoint(obj["center"]["lat"], obj["center"]["lng"]),
                   zoom=obj["zoom"])


def lookat_from_json(obj: dict) -> LookAt:
    target = obj["target"]
    return LookAt(
        target=GeoPoint(target["lat"], target["lng"], target.get("alt_m", 0.0)),
        altitude_m=obj.get("altitude_m", DEFAULT_ALTITUDE_M),
        altitude_mode=obj.get("altitude_mode", ALTITUDE_RELATIVE_TO_GROUND),
        heading_deg=obj.get("heading_deg", DEFAULT_HEADING_DEG),
        tilt_deg=obj.get("tilt_deg", DEFAULT_TILT_DEG),
        range_m=obj["range_m"],
    )


def view_from_json(obj: dict) -> MapView | LookAt:
    return mapview_from_json(obj) if "zoom" in obj else lookat_from_json(obj)


def event_json(event: PaneEvent) -> dict:
    out: dict = {"kind": event.kind, "origin": event.origin}
    if event.point is not None:
        out["point"] = geopoint_json(event.point)
    if event.placemark_id is not None:
        out["placemark_id"] = event.placemark_id
    if event.view is not None:
        out["view"] = view_json(event.view)
    if event.epoch is not None:
        out["epoch"] = event.epoch
    return out


def command_json(command: SyncCommand) -> dict:
    return {"target_pane": command.target_pane, "epoch": command.epoch,
            "view": view_json(command.view)}


def _random_point(rng: random.Random) -> GeoPoint:
    # Quantized so serialized traces are compact and reproducible.
    lat = round(DEFAULT_CENTER.lat_deg + rng.uniform(-0.5, 0.5), 9)
    lng = round(DEFAULT_CENTER.lng_deg + rng.uniform(-0.5, 0.5), 9)
    return GeoPoint(lat, lng)


def random_user_event(rng: random.Random, state: SyncState,
                      placemark_ids: list[str]) -> PaneEvent:
    """One plausible user action, seeded; used by traces and the test harness."""
    kinds = ["click2d", "click3d", "cam2d", "cam3d"]
    if placemark_ids:
        kinds.append("select")
    kind = rng.choice(kinds)
    if kind == "click2d":
        return PaneEvent(EVENT_CLICK, PANE_2D, point=_random_point(rng))
    if kind == "click3d":
        return PaneEvent(EVENT_CLICK, PANE_3D, point=_random_point(rng))
    if kind == "select":
        return PaneEvent(EVENT_SELECT, ORIGIN_DROPDOWN, placemark_id=rng.choice(placemark_ids))
    if kind == "cam2d":
        view = MapView(center=_random_point(rng), zoom=rng.randint(ZOOM_MIN, ZOOM_MAX))
        return PaneEvent(EVENT_CAMERA_CHANGED, PANE_2D, view=view, epoch=state.epoch + 1)
    view = LookAt(
        target=_random_point(rng),
        heading_deg=round(rng.uniform(0.0, 360.0) % 360.0, 6),
        tilt_deg=round(rng.uniform(0.0, 90.0), 6),
        range_m=round(rng.uniform(50.0, 1_000_000.0), 6),
    )
    return PaneEvent(EVENT_CAMERA_CHANGED, PANE_3D, view=view, epoch=state.epoch + 1)


def run_trace(events: list[PaneEvent], placemark_points: Mapping[str, GeoPoint],
              state: SyncState | None = None) -> tuple[SyncState, list[SyncCommand]]:
    """Replay a ready-made event sequence, collecting every emitted command."""
    state = state or initial_state()
    commands: list[SyncCommand] = []
    for event in events:
        state, emitted = apply_event(state, event, placemark_points)
        commands.extend(emitted)
    return state, commands


def _build_trace(rng: random.Random, placemark_points: Mapping[str, GeoPoint],
                 n_events: int) -> dict:
    """One user-event trace with its echoes interleaved as delivered.

    Echoes of one event are delivered (in a random cross-pane order) before
    the next user action, which is how the panes' FIFO streams behave.
    """
    ids = sorted(placemark_points)
    state = initial_state()
    delivered: list[PaneEvent] = []
    expected: list[SyncCommand] = []
    for _ in range(n_events):
        event = random_user_event(rng, state, ids)
        delivered.append(event)
        state, commands = apply_event(state, event, placemark_points)
        expected.extend(commands)
        echoes = [echo_of(c) for c in commands]
        rng.shuffle(echoes)
        for echo in echoes:
            delivered.append(echo)
            state, more = apply_event(state, echo, placemark_points)
            expected.extend(more)  # echoes must emit nothing
    return {
        "events": [event_json(e) for e in delivered],
        "expected_commands": [command_json(c) for c in expected],
    }


def fixture_document(placemark_points: Mapping[str, GeoPoint],
                     seed: int = FIXTURE_TRACE_SEED) -> dict:
    """The cross-language fixture vectors consumed by the browser client.

    conversions entries satisfy mapview == lookat_to_mapview(lookat); the
    ladder-derived ones also invert exactly through mapview_to_lookat.
    """
    rng = random.Random(seed)
    zoom_range_pairs = [{"zoom": z, "range_m": range_from_zoom(z)}
                        for z in range(ZOOM_MIN, ZOOM_MAX + 1)]

    conversions = []
    for z in range(ZOOM_MIN, ZOOM_MAX + 1):
        mv = MapView(center=DEFAULT_CENTER, zoom=z)
        conversions.append({"lookat": lookat_json(mapview_to_lookat(mv)),
                            "mapview": mapview_json(mv)})
    startup_camera = LookAt(target=DEFAULT_CENTER)  # heading 5, tilt 70, range 300
    conversions.append({"lookat": lookat_json(startup_camera),
                        "mapview": mapview_json(lookat_to_mapview(startup_camera))})
    for _ in range(8):
        la = LookAt(target=_random_point(rng),
                    heading_deg=round(rng.uniform(0.0, 360.0) % 360.0, 6),
                    tilt_deg=round(rng.uniform(0.0, 90.0), 6),
                    range_m=round(rng.uniform(1.0, 1e8), 6))
        conversions.append({"lookat": lookat_json(la),
                            "mapview": mapview_json(lookat_to_mapview(la))})

    start = initial_state()
    return {
        "initial_state": {
            "epoch": start.epoch,
            "view_2d": mapview_json(start.view_2d),
            "view_3d": lookat_json(start.view_3d),
        },
        "placemark_points": {pid: geopoint_json(p)
                             for pid, p in sorted(placemark_points.items())},
        "zoom_range_pairs": zoom_range_pairs,
        "conversions": conversions,
        "event_traces": [_build_trace(rng, placemark_points, _FIXTURE_TRACE_EVENTS)
                         for _ in range(_FIXTURE_TRACES)],
    }
