/**
 * View geometry shared with the server: the zoom<->range ladder and the
 * LookAt<->MapView conversions. Field names mirror the JSON wire format so
 * fixture vectors compare directly.
 */

export interface GeoPointJson {
  lat: number;
  lng: number;
  alt_m?: number;
}

export interface MapViewJson {
  center: { lat: number; lng: number };
  zoom: number;
}

export interface LookAtJson {
  target: { lat: number; lng: number; alt_m: number };
  altitude_m: number;
  altitude_mode: string;
  heading_deg: number;
  tilt_deg: number;
  range_m: number;
}

// Ground-range ladder anchored at zoom 1; halving the range steps the zoom
// up by one, making the round trip exact.
export const RANGE_AT_ZOOM_1_M = 591657550.5;
export const ZOOM_MIN = 0;
export const ZOOM_MAX = 21;

export const ALTITUDE_RELATIVE_TO_GROUND = "relative-to-ground";

export const DEFAULT_ALTITUDE_M = 10;
export const DEFAULT_HEADING_DEG = 5;
export const DEFAULT_TILT_DEG = 70;
export const DEFAULT_RANGE_M = 300;

export const DEFAULT_CENTER = { lat: 7.73687489, lng: 4.43611944 };
export const INITIAL_2D_ZOOM = 2;
export const SELECT_ZOOM = 18;

export const EARTH_RADIUS_M = 6371000;

/** Round-half-to-even, matching the server's rounding of the zoom formula. */
export function roundHalfEven(x: number): number {
  const floor = Math.floor(x);
  const diff = x - floor;
  if (diff > 0.5) return floor + 1;
  if (diff < 0.5) return floor;
  return floor % 2 === 0 ? floor : floor + 1;
}

export function zoomFromRange(rangeM: number): number {
  if (!Number.isFinite(rangeM) || rangeM <= 0) {
    throw new Error(`NONPOSITIVE_RANGE: ${rangeM}`);
  }
  const raw = roundHalfEven(1 + Math.log2(RANGE_AT_ZOOM_1_M / rangeM));
  return Math.min(ZOOM_MAX, Math.max(ZOOM_MIN, raw));
}

export function rangeFromZoom(zoom: number): number {
  if (!Number.isInteger(zoom) || zoom < ZOOM_MIN || zoom > ZOOM_MAX) {
    throw new Error(`ZOOM_OUT_OF_RANGE: ${zoom}`);
  }
  return RANGE_AT_ZOOM_1_M / 2 ** (zoom - 1);
}

/** Project the 3D camera onto the 2D pane; lat/lng pass through untouched. */
export function lookatToMapview(la: LookAtJson): MapViewJson {
  return {
    center: { lat: la.target.lat, lng: la.target.lng },
    zoom: zoomFromRange(la.range_m),
  };
}

/** Lift the 2D view to a 3D camera with the default orientation. */
export function mapviewToLookat(mv: MapViewJson): LookAtJson {
  return {
    target: { lat: mv.center.lat, lng: mv.center.lng, alt_m: 0 },
    altitude_m: DEFAULT_ALTITUDE_M,
    altitude_mode: ALTITUDE_RELATIVE_TO_GROUND,
    heading_deg: DEFAULT_HEADING_DEG,
    tilt_deg: DEFAULT_TILT_DEG,
    range_m: rangeFromZoom(mv.zoom),
  };
}

export function haversineDistanceM(a: GeoPointJson, b: GeoPointJson): number {
  const rad = Math.PI / 180;
  const phi1 = a.lat * rad;
  const phi2 = b.lat * rad;
  const dPhi = (b.lat - a.lat) * rad;
  const dLam = (b.lng - a.lng) * rad;
  const h = Math.sin(dPhi / 2) ** 2 +
    Math.cos(phi1) * Math.cos(phi2) * Math.sin(dLam / 2) ** 2;
  return EARTH_RADIUS_M * 2 * Math.atan2(Math.sqrt(h), Math.sqrt(1 - h));
}

export function normalizeHeading(headingDeg: number): number {
  const wrapped = headingDeg % 360;
  return wrapped < 0 ? wrapped + 360 : wrapped;
}

export function clamp(value: number, lo: number, hi: number): number {
  return Math.min(hi, Math.max(lo, value));
}
