/**
 * Scene camera math: deterministic projection, ground unprojection, the
 * startup camera over the town hall, top-down views, and the range clamp.
 * (Pixel output needs a real canvas; the geometry is what matters here.)
 */

import { beforeEach, describe, expect, it } from "vitest";
import snapshot from "./api_snapshot.json";
import { Scene3DPane } from "../src/scene3d.js";
import type { PlacemarkDetail, PlacemarkSummary } from "../src/api.js";
import type { LookAtJson } from "../src/geo.js";

const summaries = (snapshot as Record<string, unknown>)["/api/placemarks"] as PlacemarkSummary[];
const palace = (snapshot as Record<string, unknown>)["/api/placemarks/old-palace"] as PlacemarkDetail;

const STARTUP_CAMERA: LookAtJson = {
  target: { lat: 7.73687489, lng: 4.43611944, alt_m: 0 },
  altitude_m: 10,
  altitude_mode: "relative-to-ground",
  heading_deg: 5,
  tilt_deg: 70,
  range_m: 300,
};

function makePane(view: LookAtJson): Scene3DPane {
  const canvas = document.createElement("canvas");
  canvas.width = 560;
  canvas.height = 480;
  const pane = new Scene3DPane(canvas, view);
  const polygons = new Map([
    ["old-palace", { rings: [palace.geometry!.outer!], heightM: 8 }],
  ]);
  pane.setLayers(summaries, polygons);
  return pane;
}

describe("startup camera over the town hall", () => {
  let pane: Scene3DPane;
  beforeEach(() => {
    pane = makePane(STARTUP_CAMERA);
  });

  it("keeps the target at the canvas center", () => {
    const target = pane.project(pane.toLocal(STARTUP_CAMERA.target, 0))!;
    expect(target.x).toBeCloseTo(280, 6);
    expect(target.y).toBeCloseTo(240, 6);
  });

  it("shows building faces: roof corners sit above their base corners", () => {
    const ring = palace.geometry!.outer!;
    for (const vertex of ring.slice(0, 4)) {
      const base = pane.project(pane.toLocal(vertex, 0));
      const top = pane.project(pane.toLocal(vertex, 8));
      expect(base).not.toBeNull();
      expect(top).not.toBeNull();
      expect(top!.y).toBeLessThan(base!.y); // extrusion is visible, not flat
    }
  });

  it("projection is deterministic", () => {
    const p = pane.toLocal({ lat: 7.7371, lng: 4.4363 }, 4);
    expect(pane.project(p)).toEqual(pane.project(p));
  });

  it("unprojects its own ground projections", () => {
    const geo = { lat: 7.73695, lng: 4.43625 };
    const screen = pane.project(pane.toLocal(geo, 0))!;
    const back = pane.unproject(screen.x, screen.y)!;
    expect(back.lat).toBeCloseTo(geo.lat, 9);
    expect(back.lng).toBeCloseTo(geo.lng, 9);
  });
});

describe("top-down view (tilt 0)", () => {
  it("renders footprints as near-flat outlines (only parallax separates roof and base)", () => {
    const pane = makePane({ ...STARTUP_CAMERA, tilt_deg: 0 });
    const ring = palace.geometry!.outer!;
    for (const vertex of ring.slice(0, 4)) {
      const base = pane.project(pane.toLocal(vertex, 0))!;
      const top = pane.project(pane.toLocal(vertex, 8))!;
      const baseOffset = Math.hypot(base.x - 280, base.y - 240);
      const separation = Math.hypot(top.x - base.x, top.y - base.y);
      // an 8 m roof under a 300 m top-down camera: ~2.7% parallax, no more
      expect(separation).toBeLessThanOrEqual(baseOffset * 0.03 + 0.1);
      expect(top.y).not.toBeLessThan(base.y - baseOffset * 0.03 - 0.1); // no tilt skew
    }
  });

  it("still unprojects the center to the target", () => {
    const pane = makePane({ ...STARTUP_CAMERA, tilt_deg: 0 });
    const back = pane.unproject(280, 240)!;
    expect(back.lat).toBeCloseTo(STARTUP_CAMERA.target.lat, 8);
    expect(back.lng).toBeCloseTo(STARTUP_CAMERA.target.lng, 8);
  });
});

describe("degenerate camera", () => {
  it("clamps ranges below 1 m", () => {
    const pane = makePane(STARTUP_CAMERA);
    pane.applyView({ ...STARTUP_CAMERA, range_m: 0.2 });
    expect(pane.view.range_m).toBe(1);
  });

  it("horizon-grazing rays miss the ground", () => {
    const pane = makePane({ ...STARTUP_CAMERA, tilt_deg: 90 });
    expect(pane.unproject(280, 0)).toBeNull(); // above the horizon
  });
});
