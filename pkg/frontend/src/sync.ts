/**
 * Client-side mirror of the server's dual-pane sync state machine. The
 * behavior must reproduce the /api/fixtures event traces exactly: clicks
 * recenter both panes at unchanged scale, dropdown selection recenters at
 * city-block scale, echoes (epoch <= current) only refresh their own pane,
 * and a fresh user camera move is adopted and mirrored to the other pane.
 */

import {
  DEFAULT_ALTITUDE_M,
  ALTITUDE_RELATIVE_TO_GROUND,
  DEFAULT_CENTER,
  DEFAULT_HEADING_DEG,
  DEFAULT_RANGE_M,
  DEFAULT_TILT_DEG,
  INITIAL_2D_ZOOM,
  SELECT_ZOOM,
  lookatToMapview,
  mapviewToLookat,
  rangeFromZoom,
  type GeoPointJson,
  type LookAtJson,
  type MapViewJson,
} from "./geo.js";

export const PANE_2D = "pane-2d";
export const PANE_3D = "pane-3d";
export const ORIGIN_DROPDOWN = "dropdown";

export type Pane = typeof PANE_2D | typeof PANE_3D;
export type ViewJson = MapViewJson | LookAtJson;

export interface PaneEventJson {
  kind: "click" | "select" | "camera-changed";
  origin: Pane | typeof ORIGIN_DROPDOWN;
  point?: GeoPointJson;
  placemark_id?: string;
  view?: ViewJson;
  epoch?: number;
}

export interface SyncCommandJson {
  target_pane: Pane;
  epoch: number;
  view: ViewJson;
}

export interface SyncState {
  epoch: number;
  view2d: MapViewJson;
  view3d: LookAtJson;
}

export class UnknownPlacemarkError extends Error {
  readonly code = "UNKNOWN_PLACEMARK";
}

export function isMapView(view: ViewJson): view is MapViewJson {
  return "zoom" in view;
}

export function initialState(center: GeoPointJson = DEFAULT_CENTER): SyncState {
  return {
    epoch: 0,
    view2d: { center: { lat: center.lat, lng: center.lng }, zoom: INITIAL_2D_ZOOM },
    view3d: {
      target: { lat: center.lat, lng: center.lng, alt_m: 0 },
      altitude_m: DEFAULT_ALTITUDE_M,
      altitude_mode: ALTITUDE_RELATIVE_TO_GROUND,
      heading_deg: DEFAULT_HEADING_DEG,
      tilt_deg: DEFAULT_TILT_DEG,
      range_m: DEFAULT_RANGE_M,
    },
  };
}

export interface ApplyResult {
  state: SyncState;
  commands: SyncCommandJson[];
}

function recenter(
  state: SyncState,
  p: GeoPointJson,
  epoch: number,
  zoom?: number,
  rangeM?: number,
): ApplyResult {
  const center = { lat: p.lat, lng: p.lng };
  const view2d: MapViewJson = { center, zoom: zoom ?? state.view2d.zoom };
  const view3d: LookAtJson = {
    ...state.view3d,
    target: { lat: p.lat, lng: p.lng, alt_m: 0 },
    range_m: rangeM ?? state.view3d.range_m,
  };
  return {
    state: { epoch, view2d, view3d },
    commands: [
      { target_pane: PANE_2D, epoch, view: view2d },
      { target_pane: PANE_3D, epoch, view: view3d },
    ],
  };
}

export function applyEvent(
  state: SyncState,
  event: PaneEventJson,
  placemarkPoints?: ReadonlyMap<string, GeoPointJson>,
): ApplyResult {
  if (event.kind === "click") {
    if (!event.point) throw new Error("click event needs a point");
    return recenter(state, event.point, state.epoch + 1);
  }

  if (event.kind === "select") {
    const target = event.placemark_id !== undefined
      ? placemarkPoints?.get(event.placemark_id)
      : undefined;
    if (!target) throw new UnknownPlacemarkError(String(event.placemark_id));
    return recenter(state, target, state.epoch + 1, SELECT_ZOOM,
      rangeFromZoom(SELECT_ZOOM));
  }

  // camera-changed
  const view = event.view;
  const epoch = event.epoch;
  if (view === undefined || epoch === undefined) {
    throw new Error("camera-changed event needs a view and an epoch");
  }
  if (epoch <= state.epoch) {
    // Echo of our own command: record it for its pane, emit nothing.
    if (event.origin === PANE_2D) {
      return { state: { ...state, view2d: view as MapViewJson }, commands: [] };
    }
    return { state: { ...state, view3d: view as LookAtJson }, commands: [] };
  }
  if (event.origin === PANE_2D) {
    const view2d = view as MapViewJson;
    const view3d = mapviewToLookat(view2d);
    return {
      state: { epoch, view2d, view3d },
      commands: [{ target_pane: PANE_3D, epoch, view: view3d }],
    };
  }
  const view3d = view as LookAtJson;
  const view2d = lookatToMapview(view3d);
  return {
    state: { epoch, view2d, view3d },
    commands: [{ target_pane: PANE_2D, epoch, view: view2d }],
  };
}

/** The camera-changed event a pane reports after applying a command. */
export function echoOf(command: SyncCommandJson): PaneEventJson {
  return {
    kind: "camera-changed",
    origin: command.target_pane,
    view: command.view,
    epoch: command.epoch,
  };
}
