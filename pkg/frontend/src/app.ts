/**
 * The dual-pane viewer application: a "Historical Location" dropdown on top,
 * 2D attribute map and 2.5D scene side by side, attribute panel on the
 * right. All pane movement flows through the sync state machine; commands
 * are applied to the panes, whose echoes feed straight back in.
 */

import { ApiClient, type PlacemarkDetail, type PlacemarkSummary, type RingVertex } from "./api.js";
import { Map2DPane } from "./map2d.js";
import { Scene3DPane } from "./scene3d.js";
import { pickAt, type PickCandidate } from "./pick.js";
import {
  applyEvent,
  echoOf,
  initialState,
  PANE_2D,
  PANE_3D,
  ORIGIN_DROPDOWN,
  type PaneEventJson,
  type SyncCommandJson,
  type SyncState,
} from "./sync.js";
import type { GeoPointJson, LookAtJson, MapViewJson } from "./geo.js";

export interface AppElements {
  dropdown: HTMLSelectElement;
  canvas2d: HTMLCanvasElement;
  canvas3d: HTMLCanvasElement;
  attributePanel: HTMLElement;
  infoWindow: HTMLElement;
  banner: HTMLElement;
  retryButton: HTMLButtonElement;
}

export class App {
  sync: SyncState = initialState();
  selectedId: string | null = null;
  openInfoId: string | null = null;
  summaries: PlacemarkSummary[] = [];
  details = new Map<string, PlacemarkDetail>();

  readonly pane2d: Map2DPane;
  readonly pane3d: Scene3DPane;
  private readonly points = new Map<string, GeoPointJson>();

  constructor(private readonly api: ApiClient, private readonly elements: AppElements) {
    this.pane2d = new Map2DPane(elements.canvas2d, this.sync.view2d);
    this.pane3d = new Scene3DPane(elements.canvas3d, this.sync.view3d);

    this.pane2d.onClick = (p) => this.handleMapClick(PANE_2D, p);
    this.pane2d.onPan = (view) => this.handleCameraChanged(PANE_2D, view);
    this.pane3d.onClick = (p) => this.handleMapClick(PANE_3D, p);
    this.pane3d.onOrbit = (view) => this.handleCameraChanged(PANE_3D, view);

    elements.dropdown.addEventListener("change", () => {
      const id = elements.dropdown.value;
      if (id) void this.selectPlacemark(id);
    });
    elements.retryButton.addEventListener("click", () => void this.load());
  }

  async load(): Promise<void> {
    this.hideBanner();
    try {
      this.summaries = await this.api.listPlacemarks();
      this.details.clear();
      for (const summary of this.summaries) {
        this.details.set(summary.id, await this.api.getPlacemark(summary.id));
        this.points.set(summary.id, { lat: summary.lat, lng: summary.lng });
      }
    } catch (err) {
      this.showBanner(`Could not reach the server: ${String(err)}`);
      return;
    }
    this.populateDropdown();
    this.pushLayers();
  }

  private populateDropdown(): void {
    const dropdown = this.elements.dropdown;
    dropdown.innerHTML = "";
    const placeholder = document.createElement("option");
    placeholder.value = "";
    placeholder.textContent = "Historical Location…";
    dropdown.appendChild(placeholder);
    for (const summary of this.summaries) {
      const option = document.createElement("option");
      option.value = summary.id;
      option.textContent = summary.name; // already truncated server-side
      dropdown.appendChild(option);
    }
  }

  private polygonRings(id: string): RingVertex[][] | undefined {
    const geometry = this.details.get(id)?.geometry;
    if (!geometry || geometry.type !== "polygon" || !geometry.outer) return undefined;
    return [geometry.outer, ...(geometry.inners ?? [])];
  }

  private pushLayers(): void {
    const polygons2d = new Map<string, RingVertex[][]>();
    const polygons3d = new Map<string, { rings: RingVertex[][]; heightM: number }>();
    for (const summary of this.summaries) {
      const rings = this.polygonRings(summary.id);
      if (!rings) continue;
      polygons2d.set(summary.id, rings);
      polygons3d.set(summary.id, {
        rings,
        heightM: this.details.get(summary.id)?.extrude_height_m ?? 8,
      });
    }
    this.pane2d.setLayers({ summaries: this.summaries, polygons: polygons2d });
    this.pane3d.setLayers(this.summaries, polygons3d);
  }

  /** Feed one event through the machine and deliver commands to the panes;
   * each pane application immediately echoes back (and must stay silent). */
  dispatch(event: PaneEventJson): SyncCommandJson[] {
    const { state, commands } = applyEvent(this.sync, event, this.points);
    this.sync = state;
    for (const command of commands) {
      if (command.target_pane === PANE_2D) {
        this.pane2d.applyView(command.view as MapViewJson);
      } else {
        this.pane3d.applyView(command.view as LookAtJson);
      }
      const echoResult = applyEvent(this.sync, echoOf(command), this.points);
      this.sync = echoResult.state;
      if (echoResult.commands.length > 0) {
        throw new Error("sync echo generated commands; suppression broken");
      }
    }
    return commands;
  }

  async selectPlacemark(id: string): Promise<void> {
    if (!this.points.has(id)) {
      this.showBanner(`Unknown location "${id}"; reloading the list.`);
      void this.load();
      return;
    }
    this.dispatch({ kind: "select", origin: ORIGIN_DROPDOWN, placemark_id: id });
    this.selectedId = id;
    this.closeInfoWindow();
    this.pane2d.setSelected(id);
    this.pane3d.setSelected(id);
    this.elements.dropdown.value = id;
    try {
      const { attributes } = await this.api.getAttributes(id);
      this.renderAttributePanel(id, attributes);
    } catch (err) {
      this.showBanner(`Could not load attributes: ${String(err)}`);
    }
  }

  handleMapClick(origin: typeof PANE_2D | typeof PANE_3D, p: { lat: number; lng: number }): void {
    const candidates: PickCandidate[] = this.summaries.map((s) => ({
      id: s.id,
      point: { lat: s.lat, lng: s.lng },
      rings: this.polygonRings(s.id),
    }));
    const tolDeg = this.clickToleranceDeg(origin);
    const hit = pickAt(candidates, p, tolDeg);
    if (hit) {
      void this.openInfoWindow(hit.id);
      return;
    }
    this.closeInfoWindow();
    this.dispatch({ kind: "click", origin, point: { lat: p.lat, lng: p.lng } });
  }

  /** Marker picking tolerance scaled to what ~12 px means at the current view. */
  private clickToleranceDeg(origin: typeof PANE_2D | typeof PANE_3D): number {
    if (origin === PANE_2D) {
      return Math.max(1e-3, this.pane2d.degPerPixel() * 12);
    }
    const metersPerDeg = 110540;
    return Math.max(1e-3, (this.pane3d.view.range_m / 40) / metersPerDeg);
  }

  handleCameraChanged(origin: typeof PANE_2D | typeof PANE_3D, view: MapViewJson | LookAtJson): void {
    this.dispatch({
      kind: "camera-changed",
      origin,
      view,
      epoch: this.sync.epoch + 1, // fresh, user-originated
    });
  }

  async openInfoWindow(id: string): Promise<void> {
    this.closeInfoWindow(); // at most one info window at a time
    let attributes;
    try {
      attributes = (await this.api.getAttributes(id)).attributes;
    } catch (err) {
      this.showBanner(`Could not load attributes: ${String(err)}`);
      return;
    }
    const summary = this.summaries.find((s) => s.id === id);
    if (!summary) return;
    const info = this.elements.infoWindow;
    info.innerHTML = "";
    const title = document.createElement("strong");
    title.textContent = id;
    info.appendChild(title);
    for (const pair of attributes) {
      const row = document.createElement("p");
      row.className = "info-row";
      row.textContent = pair.value;
      info.appendChild(row);
    }
    const anchor = this.pane2d.geoToScreen(summary);
    info.style.left = `${Math.round(anchor.x)}px`;
    info.style.top = `${Math.round(anchor.y - 24)}px`;
    info.hidden = false;
    this.openInfoId = id;
    this.renderAttributePanel(id, attributes);
  }

  closeInfoWindow(): void {
    this.elements.infoWindow.hidden = true;
    this.elements.infoWindow.innerHTML = "";
    this.openInfoId = null;
  }

  private renderAttributePanel(id: string, attributes: { key: string; value: string }[]): void {
    const panel = this.elements.attributePanel;
    panel.innerHTML = "";
    const heading = document.createElement("h2");
    heading.textContent = id;
    panel.appendChild(heading);
    const detail = this.details.get(id);
    for (const pair of attributes) {
      const dt = document.createElement("h3");
      dt.textContent = pair.key;
      const dd = document.createElement("p");
      dd.textContent = pair.value;
      panel.append(dt, dd);
    }
    if (detail) {
      const location = document.createElement("p");
      location.className = "muted";
      const point = this.points.get(id);
      if (point) {
        location.textContent =
          `location: ${point.lat.toFixed(8)}, ${point.lng.toFixed(8)}` +
          (detail.geometry?.type === "polygon"
            ? ` · footprint ${detail.extrude_height_m ?? 8} m`
            : "");
      }
      panel.appendChild(location);
    }
  }

  showBanner(message: string): void {
    this.elements.banner.hidden = false;
    const label = this.elements.banner.querySelector(".banner-text");
    if (label) label.textContent = message;
  }

  hideBanner(): void {
    this.elements.banner.hidden = true;
  }
}
