/** Typed client for the geoatlas REST API (read-only plus the convert POST). */

import type { LookAtJson, MapViewJson } from "./geo.js";

export interface PlacemarkSummary {
  id: string;
  name: string;
  lat: number;
  lng: number;
}

export interface AttributePair {
  key: string;
  value: string;
}

export interface RingVertex {
  lat: number;
  lng: number;
}

export interface PlacemarkGeometry {
  type: "point" | "polygon";
  lat?: number;
  lng?: number;
  alt_m?: number;
  outer?: RingVertex[];
  inners?: RingVertex[][];
  tessellate?: boolean;
}

export interface PlacemarkDetail {
  id: string;
  name: string;
  description: string;
  style_ref: string | null;
  geometry: PlacemarkGeometry | null;
  extrude_height_m: number | null;
  attributes: AttributePair[];
}

export interface FixtureDocument {
  initial_state: { epoch: number; view_2d: MapViewJson; view_3d: LookAtJson };
  placemark_points: Record<string, { lat: number; lng: number }>;
  zoom_range_pairs: { zoom: number; range_m: number }[];
  conversions: { lookat: LookAtJson; mapview: MapViewJson }[];
  event_traces: { events: unknown[]; expected_commands: unknown[] }[];
}

export class ApiError extends Error {
  constructor(readonly status: number, readonly code: string, message: string) {
    super(message);
  }
}

async function parseError(response: Response): Promise<ApiError> {
  let code = "INTERNAL";
  let message = `HTTP ${response.status}`;
  try {
    const body = (await response.json()) as { error?: { code: string; message: string } };
    if (body.error) {
      code = body.error.code;
      message = body.error.message;
    }
  } catch {
    // non-JSON error body; keep defaults
  }
  return new ApiError(response.status, code, message);
}

export class ApiClient {
  constructor(private readonly baseUrl: string = "") {}

  private async getJson<T>(path: string): Promise<T> {
    const response = await fetch(this.baseUrl + path);
    if (!response.ok) throw await parseError(response);
    return (await response.json()) as T;
  }

  listPlacemarks(bbox?: string): Promise<PlacemarkSummary[]> {
    const suffix = bbox ? `?bbox=${encodeURIComponent(bbox)}` : "";
    return this.getJson(`/api/placemarks${suffix}`);
  }

  getPlacemark(id: string): Promise<PlacemarkDetail> {
    return this.getJson(`/api/placemarks/${encodeURIComponent(id)}`);
  }

  getAttributes(id: string): Promise<{ id: string; attributes: AttributePair[] }> {
    return this.getJson(`/api/placemarks/${encodeURIComponent(id)}/attributes`);
  }

  getFixtures(): Promise<FixtureDocument> {
    return this.getJson("/api/fixtures");
  }

  async convertView(
    direction: "to-mapview" | "to-lookat",
    view: MapViewJson | LookAtJson,
  ): Promise<MapViewJson | LookAtJson> {
    const response = await fetch(`${this.baseUrl}/api/viewsync/convert`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ direction, view }),
    });
    if (!response.ok) throw await parseError(response);
    return (await response.json()) as MapViewJson | LookAtJson;
  }
}
