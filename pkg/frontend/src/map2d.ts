/**
 * 2D attribute-map pane: locally rendered graticule + placemark layer on a
 * canvas (no external imagery), always north-up. Scale follows the shared
 * zoom ladder: 360 degrees of longitude span 256 * 2^zoom pixels.
 */

import { clamp, type MapViewJson } from "./geo.js";
import type { PlacemarkSummary, RingVertex } from "./api.js";

const BASE_TILE_PX = 256;

export interface MapLayers {
  summaries: PlacemarkSummary[];
  polygons: Map<string, RingVertex[][]>;
}

export type ClickHandler = (p: { lat: number; lng: number }) => void;
export type PanHandler = (view: MapViewJson) => void;

function graticuleStep(degPerPx: number, targetPx: number): number {
  const raw = degPerPx * targetPx;
  const power = 10 ** Math.floor(Math.log10(raw));
  for (const mult of [1, 2, 5, 10]) {
    if (power * mult >= raw) return power * mult;
  }
  return power * 10;
}

export class Map2DPane {
  view: MapViewJson;
  private layers: MapLayers = { summaries: [], polygons: new Map() };
  private selectedId: string | null = null;
  private dragging = false;
  private moved = false;
  private dragStart: { x: number; y: number; view: MapViewJson } | null = null;

  onClick: ClickHandler = () => {};
  onPan: PanHandler = () => {};

  constructor(readonly canvas: HTMLCanvasElement, initialView: MapViewJson) {
    this.view = initialView;
    canvas.addEventListener("mousedown", (e) => this.handleDown(e));
    canvas.addEventListener("mousemove", (e) => this.handleMove(e));
    canvas.addEventListener("mouseup", (e) => this.handleUp(e));
    canvas.addEventListener("mouseleave", () => {
      this.dragging = false;
      this.dragStart = null;
    });
  }

  degPerPixel(): number {
    return 360 / (BASE_TILE_PX * 2 ** this.view.zoom);
  }

  geoToScreen(p: { lat: number; lng: number }): { x: number; y: number } {
    const scale = this.degPerPixel();
    return {
      x: this.canvas.width / 2 + (p.lng - this.view.center.lng) / scale,
      y: this.canvas.height / 2 - (p.lat - this.view.center.lat) / scale,
    };
  }

  screenToGeo(x: number, y: number): { lat: number; lng: number } {
    const scale = this.degPerPixel();
    return {
      lat: clamp(this.view.center.lat - (y - this.canvas.height / 2) * scale, -90, 90),
      lng: clamp(this.view.center.lng + (x - this.canvas.width / 2) * scale, -180, 180),
    };
  }

  setLayers(layers: MapLayers): void {
    this.layers = layers;
    this.render();
  }

  setSelected(id: string | null): void {
    this.selectedId = id;
    this.render();
  }

  applyView(view: MapViewJson): void {
    this.view = view;
    this.render();
  }

  private localPoint(e: MouseEvent): { x: number; y: number } {
    const rect = this.canvas.getBoundingClientRect();
    return { x: e.clientX - rect.left, y: e.clientY - rect.top };
  }

  private handleDown(e: MouseEvent): void {
    this.dragging = true;
    this.moved = false;
    this.dragStart = { ...this.localPoint(e), view: this.view };
  }

  private handleMove(e: MouseEvent): void {
    if (!this.dragging || !this.dragStart) return;
    const { x, y } = this.localPoint(e);
    const dx = x - this.dragStart.x;
    const dy = y - this.dragStart.y;
    if (Math.abs(dx) + Math.abs(dy) < 3) return;
    this.moved = true;
    const scale = 360 / (BASE_TILE_PX * 2 ** this.dragStart.view.zoom);
    this.view = {
      center: {
        lat: clamp(this.dragStart.view.center.lat + dy * scale, -90, 90),
        lng: clamp(this.dragStart.view.center.lng - dx * scale, -180, 180),
      },
      zoom: this.dragStart.view.zoom,
    };
    this.render();
  }

  private handleUp(e: MouseEvent): void {
    const wasDrag = this.moved;
    this.dragging = false;
    this.dragStart = null;
    this.moved = false;
    if (wasDrag) {
      this.onPan(this.view);
      return;
    }
    const { x, y } = this.localPoint(e);
    this.onClick(this.screenToGeo(x, y));
  }

  render(): void {
    const ctx = this.canvas.getContext("2d");
    if (!ctx) return; // headless test environment
    const { width, height } = this.canvas;
    ctx.fillStyle = "#f6f3ec";
    ctx.fillRect(0, 0, width, height);

    this.renderGraticule(ctx);
    this.renderPolygons(ctx);
    this.renderMarkers(ctx);

    ctx.fillStyle = "#444";
    ctx.font = "11px sans-serif";
    ctx.fillText(
      `2D  zoom ${this.view.zoom}  center ${this.view.center.lat.toFixed(6)}, ` +
      `${this.view.center.lng.toFixed(6)}`,
      8, height - 8);
  }

  private renderGraticule(ctx: CanvasRenderingContext2D): void {
    const { width, height } = this.canvas;
    const step = graticuleStep(this.degPerPixel(), 90);
    ctx.strokeStyle = "#d8d2c4";
    ctx.fillStyle = "#a9a294";
    ctx.lineWidth = 1;
    ctx.font = "10px sans-serif";
    const west = this.screenToGeo(0, height / 2).lng;
    const east = this.screenToGeo(width, height / 2).lng;
    for (let lng = Math.ceil(west / step) * step; lng <= east; lng += step) {
      const { x } = this.geoToScreen({ lat: this.view.center.lat, lng });
      ctx.beginPath();
      ctx.moveTo(x, 0);
      ctx.lineTo(x, height);
      ctx.stroke();
      ctx.fillText(`${lng.toFixed(step < 0.01 ? 3 : 2)}°`, x + 3, 12);
    }
    const north = this.screenToGeo(width / 2, 0).lat;
    const south = this.screenToGeo(width / 2, height).lat;
    for (let lat = Math.ceil(south / step) * step; lat <= north; lat += step) {
      const { y } = this.geoToScreen({ lat, lng: this.view.center.lng });
      ctx.beginPath();
      ctx.moveTo(0, y);
      ctx.lineTo(width, y);
      ctx.stroke();
      ctx.fillText(`${lat.toFixed(step < 0.01 ? 3 : 2)}°`, 3, y - 3);
    }
  }

  private renderPolygons(ctx: CanvasRenderingContext2D): void {
    for (const [id, rings] of this.layers.polygons) {
      ctx.fillStyle = id === this.selectedId ? "rgba(210,120,30,0.45)" : "rgba(70,110,180,0.35)";
      ctx.strokeStyle = "#3a5a90";
      ctx.lineWidth = 1.5;
      for (const ring of rings) {
        ctx.beginPath();
        ring.forEach((v, i) => {
          const { x, y } = this.geoToScreen(v);
          if (i === 0) ctx.moveTo(x, y);
          else ctx.lineTo(x, y);
        });
        ctx.closePath();
        ctx.stroke();
      }
      if (rings.length > 0) {
        ctx.beginPath();
        rings[0].forEach((v, i) => {
          const { x, y } = this.geoToScreen(v);
          if (i === 0) ctx.moveTo(x, y);
          else ctx.lineTo(x, y);
        });
        ctx.closePath();
        ctx.fill();
      }
    }
  }

  private renderMarkers(ctx: CanvasRenderingContext2D): void {
    for (const summary of this.layers.summaries) {
      const { x, y } = this.geoToScreen(summary);
      const selected = summary.id === this.selectedId;
      ctx.fillStyle = selected ? "#d2781e" : "#c03434";
      ctx.beginPath();
      ctx.moveTo(x, y);
      ctx.lineTo(x - 6, y - 14);
      ctx.lineTo(x + 6, y - 14);
      ctx.closePath();
      ctx.fill();
      ctx.beginPath();
      ctx.arc(x, y - 17, 4.5, 0, 2 * Math.PI);
      ctx.fill();
      ctx.fillStyle = "#333";
      ctx.font = "10px sans-serif";
      ctx.fillText(summary.id, x + 8, y - 6);
    }
  }
}
