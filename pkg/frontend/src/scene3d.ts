/**
 * 2.5D scene pane: extruded footprints rendered from a LookAt camera with a
 * plain perspective projection and painter's-order faces. Point placemarks
 * render as pedestal markers. Dragging orbits heading/tilt and reports a
 * camera-changed view to the app.
 */

import { clamp, normalizeHeading, type LookAtJson } from "./geo.js";
import type { PlacemarkSummary, RingVertex } from "./api.js";

const M_PER_DEG_LAT = 110540;
const M_PER_DEG_LNG_EQUATOR = 111320;
const FOV_DEG = 55;
const NEAR_M = 0.5;
const MIN_RANGE_M = 1; // degenerate cameras clamp here

type Vec3 = [number, number, number];

export interface SceneFootprint {
  placemarkId: string;
  outline: Vec3[]; // base vertices in local meters, no closing duplicate
  heightM: number;
}

export interface ScenePedestal {
  placemarkId: string;
  at: Vec3;
}

export type OrbitHandler = (view: LookAtJson) => void;
export type SceneClickHandler = (p: { lat: number; lng: number }) => void;

function sub(a: Vec3, b: Vec3): Vec3 {
  return [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
}

function cross(a: Vec3, b: Vec3): Vec3 {
  return [
    a[1] * b[2] - a[2] * b[1],
    a[2] * b[0] - a[0] * b[2],
    a[0] * b[1] - a[1] * b[0],
  ];
}

function dot(a: Vec3, b: Vec3): number {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

function norm(a: Vec3): Vec3 {
  const len = Math.hypot(a[0], a[1], a[2]) || 1;
  return [a[0] / len, a[1] / len, a[2] / len];
}

export class Scene3DPane {
  view: LookAtJson;
  private anchor = { lat: 0, lng: 0 };
  private mPerDegLng = M_PER_DEG_LNG_EQUATOR;
  private footprints: SceneFootprint[] = [];
  private pedestals: ScenePedestal[] = [];
  private selectedId: string | null = null;
  private dragging = false;
  private moved = false;
  private dragStart: { x: number; y: number; heading: number; tilt: number } | null = null;

  onOrbit: OrbitHandler = () => {};
  onClick: SceneClickHandler = () => {};

  constructor(readonly canvas: HTMLCanvasElement, initialView: LookAtJson) {
    this.view = initialView;
    canvas.addEventListener("mousedown", (e) => this.handleDown(e));
    canvas.addEventListener("mousemove", (e) => this.handleMove(e));
    canvas.addEventListener("mouseup", (e) => this.handleUp(e));
    canvas.addEventListener("mouseleave", () => {
      this.dragging = false;
      this.dragStart = null;
    });
  }

  setLayers(summaries: PlacemarkSummary[],
            polygons: Map<string, { rings: RingVertex[][]; heightM: number }>): void {
    if (summaries.length > 0) {
      this.anchor = {
        lat: summaries.reduce((s, p) => s + p.lat, 0) / summaries.length,
        lng: summaries.reduce((s, p) => s + p.lng, 0) / summaries.length,
      };
    }
    this.mPerDegLng = M_PER_DEG_LNG_EQUATOR * Math.cos((this.anchor.lat * Math.PI) / 180);
    this.footprints = [];
    this.pedestals = [];
    for (const summary of summaries) {
      const polygon = polygons.get(summary.id);
      if (polygon && polygon.rings.length > 0) {
        const ring = polygon.rings[0];
        const outline = ring.slice(0, ring.length - 1).map((v) => this.toLocal(v, 0));
        this.footprints.push({ placemarkId: summary.id, outline, heightM: polygon.heightM });
      } else {
        this.pedestals.push({ placemarkId: summary.id, at: this.toLocal(summary, 0) });
      }
    }
    this.render();
  }

  setSelected(id: string | null): void {
    this.selectedId = id;
    this.render();
  }

  applyView(view: LookAtJson): void {
    this.view = { ...view, range_m: Math.max(MIN_RANGE_M, view.range_m) };
    this.render();
  }

  toLocal(p: { lat: number; lng: number }, z: number): Vec3 {
    return [
      (p.lng - this.anchor.lng) * this.mPerDegLng,
      (p.lat - this.anchor.lat) * M_PER_DEG_LAT,
      z,
    ];
  }

  fromLocal(v: Vec3): { lat: number; lng: number } {
    return {
      lat: this.anchor.lat + v[1] / M_PER_DEG_LAT,
      lng: this.anchor.lng + v[0] / this.mPerDegLng,
    };
  }

  private camera(): { position: Vec3; forward: Vec3; right: Vec3; up: Vec3; focal: number } {
    const rad = Math.PI / 180;
    const tilt = this.view.tilt_deg * rad;
    const heading = this.view.heading_deg * rad;
    const range = Math.max(MIN_RANGE_M, this.view.range_m);
    const target = this.toLocal(this.view.target, 0);
    const back = heading + Math.PI; // camera sits opposite its facing azimuth
    const horizontal = range * Math.sin(tilt);
    const position: Vec3 = [
      target[0] + horizontal * Math.sin(back),
      target[1] + horizontal * Math.cos(back),
      target[2] + range * Math.cos(tilt),
    ];
    const forward = norm(sub(target, position));
    // Straight-down views need a horizon hint, otherwise up is degenerate.
    const upHint: Vec3 = this.view.tilt_deg < 1e-6
      ? [Math.sin(heading), Math.cos(heading), 0]
      : [0, 0, 1];
    const right = norm(cross(forward, upHint));
    const up = cross(right, forward);
    const focal = (this.canvas.height / 2) / Math.tan((FOV_DEG * rad) / 2);
    return { position, forward, right, up, focal };
  }

  /** Project a local-meters point; null when behind the near plane. */
  project(v: Vec3): { x: number; y: number; depth: number } | null {
    const { position, forward, right, up, focal } = this.camera();
    const d = sub(v, position);
    const depth = dot(d, forward);
    if (depth < NEAR_M) return null;
    return {
      x: this.canvas.width / 2 + (focal * dot(d, right)) / depth,
      y: this.canvas.height / 2 - (focal * dot(d, up)) / depth,
      depth,
    };
  }

  /** Ground point (z=0) under a canvas pixel; null when the ray misses. */
  unproject(x: number, y: number): { lat: number; lng: number } | null {
    const { position, forward, right, up, focal } = this.camera();
    const px = x - this.canvas.width / 2;
    const py = this.canvas.height / 2 - y;
    const dir: Vec3 = [
      forward[0] + (right[0] * px + up[0] * py) / focal,
      forward[1] + (right[1] * px + up[1] * py) / focal,
      forward[2] + (right[2] * px + up[2] * py) / focal,
    ];
    if (dir[2] >= -1e-12) return null; // looking at or above the horizon
    const t = -position[2] / dir[2];
    return this.fromLocal([position[0] + t * dir[0], position[1] + t * dir[1], 0]);
  }

  private handleDown(e: MouseEvent): void {
    const rect = this.canvas.getBoundingClientRect();
    this.dragging = true;
    this.moved = false;
    this.dragStart = {
      x: e.clientX - rect.left,
      y: e.clientY - rect.top,
      heading: this.view.heading_deg,
      tilt: this.view.tilt_deg,
    };
  }

  private handleMove(e: MouseEvent): void {
    if (!this.dragging || !this.dragStart) return;
    const rect = this.canvas.getBoundingClientRect();
    const dx = e.clientX - rect.left - this.dragStart.x;
    const dy = e.clientY - rect.top - this.dragStart.y;
    if (Math.abs(dx) + Math.abs(dy) < 3) return;
    this.moved = true;
    this.view = {
      ...this.view,
      heading_deg: normalizeHeading(this.dragStart.heading + dx * 0.4),
      tilt_deg: clamp(this.dragStart.tilt - dy * 0.25, 0, 90),
    };
    this.render();
  }

  private handleUp(e: MouseEvent): void {
    const wasDrag = this.moved;
    this.dragging = false;
    this.dragStart = null;
    this.moved = false;
    const rect = this.canvas.getBoundingClientRect();
    if (wasDrag) {
      this.onOrbit(this.view);
      return;
    }
    const hit = this.unproject(e.clientX - rect.left, e.clientY - rect.top);
    if (hit) this.onClick(hit);
  }

  render(): void {
    const ctx = this.canvas.getContext("2d");
    if (!ctx) return; // headless test environment
    const { width, height } = this.canvas;
    const sky = ctx.createLinearGradient(0, 0, 0, height);
    sky.addColorStop(0, "#dfeaf2");
    sky.addColorStop(1, "#f3efe6");
    ctx.fillStyle = sky;
    ctx.fillRect(0, 0, width, height);

    this.renderGroundGrid(ctx);

    interface Face {
      points: { x: number; y: number }[];
      depth: number;
      fill: string;
      stroke: string;
    }
    const faces: Face[] = [];

    const addFace = (vertices: Vec3[], fill: string, stroke: string) => {
      const projected = vertices.map((v) => this.project(v));
      if (projected.some((p) => p === null)) return;
      const points = projected as { x: number; y: number; depth: number }[];
      faces.push({
        points,
        depth: points.reduce((s, p) => s + p.depth, 0) / points.length,
        fill,
        stroke,
      });
    };

    for (const fp of this.footprints) {
      const selected = fp.placemarkId === this.selectedId;
      const wall = selected ? "rgba(216,140,60,0.85)" : "rgba(120,150,195,0.85)";
      const roof = selected ? "rgba(235,170,95,0.95)" : "rgba(150,178,218,0.95)";
      const edge = "#46577a";
      const n = fp.outline.length;
      for (let i = 0; i < n; i++) {
        const a = fp.outline[i];
        const b = fp.outline[(i + 1) % n];
        addFace(
          [a, b, [b[0], b[1], fp.heightM], [a[0], a[1], fp.heightM]],
          wall, edge);
      }
      addFace(fp.outline.map((v): Vec3 => [v[0], v[1], fp.heightM]), roof, edge);
    }

    for (const pedestal of this.pedestals) {
      const selected = pedestal.placemarkId === this.selectedId;
      const fill = selected ? "rgba(216,140,60,0.95)" : "rgba(192,52,52,0.9)";
      const [x, y] = pedestal.at;
      const s = 1.6;
      const h = 10;
      const base: Vec3[] = [
        [x - s, y - s, 0], [x + s, y - s, 0], [x + s, y + s, 0], [x - s, y + s, 0],
      ];
      for (let i = 0; i < 4; i++) {
        const a = base[i];
        const b = base[(i + 1) % 4];
        addFace([a, b, [b[0], b[1], h], [a[0], a[1], h]], fill, "#7c2a2a");
      }
      addFace(base.map((v): Vec3 => [v[0], v[1], h]), fill, "#7c2a2a");
    }

    faces.sort((a, b) => b.depth - a.depth); // painter's order, far first
    for (const face of faces) {
      ctx.beginPath();
      face.points.forEach((p, i) => (i === 0 ? ctx.moveTo(p.x, p.y) : ctx.lineTo(p.x, p.y)));
      ctx.closePath();
      ctx.fillStyle = face.fill;
      ctx.fill();
      ctx.strokeStyle = face.stroke;
      ctx.lineWidth = 0.7;
      ctx.stroke();
    }

    ctx.fillStyle = "#444";
    ctx.font = "11px sans-serif";
    ctx.fillText(
      `3D  heading ${this.view.heading_deg.toFixed(1)}°  tilt ` +
      `${this.view.tilt_deg.toFixed(1)}°  range ${this.view.range_m.toFixed(0)} m`,
      8, height - 8);
  }

  private renderGroundGrid(ctx: CanvasRenderingContext2D): void {
    const range = Math.max(MIN_RANGE_M, this.view.range_m);
    const step = 10 ** Math.ceil(Math.log10(range / 8));
    const target = this.toLocal(this.view.target, 0);
    const lines = 8;
    ctx.strokeStyle = "rgba(150,144,130,0.45)";
    ctx.lineWidth = 0.6;
    for (let i = -lines; i <= lines; i++) {
      for (const horizontal of [true, false]) {
        const a: Vec3 = horizontal
          ? [target[0] - lines * step, target[1] + i * step, 0]
          : [target[0] + i * step, target[1] - lines * step, 0];
        const b: Vec3 = horizontal
          ? [target[0] + lines * step, target[1] + i * step, 0]
          : [target[0] + i * step, target[1] + lines * step, 0];
        const pa = this.project(a);
        const pb = this.project(b);
        if (!pa || !pb) continue;
        ctx.beginPath();
        ctx.moveTo(pa.x, pa.y);
        ctx.lineTo(pb.x, pb.y);
        ctx.stroke();
      }
    }
  }
}
