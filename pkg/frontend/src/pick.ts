/**
 * Client-side click picking, mirroring the server's rules: polygon-interior
 * hits win, then the nearest marker within tolerance (planar degrees), ties
 * by lexicographic id.
 */

import { haversineDistanceM } from "./geo.js";
import type { RingVertex } from "./api.js";

export const DEFAULT_PICK_TOLERANCE_DEG = 1e-3;

export interface PickCandidate {
  id: string;
  point: { lat: number; lng: number };
  rings?: RingVertex[][]; // closed rings, outer first, when full geometry is cached
}

export interface PickHit {
  id: string;
  distanceM: number;
  hitKind: "marker" | "polygon-interior";
}

function onSegment(
  px: number, py: number, x1: number, y1: number, x2: number, y2: number,
): boolean {
  const cross = (px - x1) * (y2 - y1) - (py - y1) * (x2 - x1);
  if (cross !== 0) return false;
  return Math.min(x1, x2) <= px && px <= Math.max(x1, x2) &&
    Math.min(y1, y2) <= py && py <= Math.max(y1, y2);
}

/** Even-odd containment over closed rings; edges and vertices count inside. */
export function pointInRings(p: { lat: number; lng: number }, rings: RingVertex[][]): boolean {
  const x = p.lng;
  const y = p.lat;
  for (const ring of rings) {
    for (let i = 0; i < ring.length - 1; i++) {
      const a = ring[i];
      const b = ring[i + 1];
      if (onSegment(x, y, a.lng, a.lat, b.lng, b.lat)) return true;
    }
  }
  let inside = false;
  for (const ring of rings) {
    for (let i = 0; i < ring.length - 1; i++) {
      const a = ring[i];
      const b = ring[i + 1];
      if ((a.lat > y) !== (b.lat > y) &&
          x < a.lng + ((y - a.lat) * (b.lng - a.lng)) / (b.lat - a.lat)) {
        inside = !inside;
      }
    }
  }
  return inside;
}

export function pickAt(
  candidates: readonly PickCandidate[],
  p: { lat: number; lng: number },
  tolDeg: number = DEFAULT_PICK_TOLERANCE_DEG,
): PickHit | null {
  const interior = candidates
    .filter((c) => c.rings && c.rings.length > 0 && pointInRings(p, c.rings))
    .sort((a, b) => (a.id < b.id ? -1 : 1));
  if (interior.length > 0) {
    return { id: interior[0].id, distanceM: 0, hitKind: "polygon-interior" };
  }
  let best: PickCandidate | null = null;
  let bestDeg = Infinity;
  for (const c of candidates) {
    const dDeg = Math.hypot(p.lat - c.point.lat, p.lng - c.point.lng);
    if (dDeg > tolDeg) continue;
    if (dDeg < bestDeg || (dDeg === bestDeg && best !== null && c.id < best.id)) {
      best = c;
      bestDeg = dDeg;
    }
  }
  if (!best) return null;
  return {
    id: best.id,
    distanceM: haversineDistanceM(p, best.point),
    hitKind: "marker",
  };
}
