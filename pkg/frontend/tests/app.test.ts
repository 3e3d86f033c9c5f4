/**
 * Interaction flow against the real DOM logic (happy-dom, stubbed fetch
 * serving recorded API responses): dropdown selection centers both panes on
 * the town hall and fills the attribute panel; clicking its marker opens
 * exactly one info window with the same prose.
 */

import { beforeEach, describe, expect, it, vi } from "vitest";
import snapshot from "./api_snapshot.json";
import { ApiClient } from "../src/api.js";
import { App, type AppElements } from "../src/app.js";

const TOWN_HALL = { lat: 7.73687489, lng: 4.43611944 };
const TOWN_HALL_PROSE =
  "Ede Town Hall is an ancient hall that serves as a point of, discussions, " +
  "functions, events and meetings. It's at the center of the city and directly " +
  "beside the Kings Palace.";

const routes = snapshot as Record<string, unknown>;

function stubFetch(): void {
  vi.stubGlobal("fetch", vi.fn(async (input: RequestInfo | URL) => {
    const path = String(input);
    if (path in routes) {
      return new Response(JSON.stringify(routes[path]), {
        status: 200,
        headers: { "Content-Type": "application/json" },
      });
    }
    return new Response(JSON.stringify({
      error: { code: "NOT_FOUND", message: `no route ${path}` },
    }), { status: 404 });
  }));
}

function mountDom(): AppElements {
  document.body.innerHTML = `
    <select id="location-dropdown"></select>
    <div id="error-banner" hidden><span class="banner-text"></span>
      <button id="retry-button"></button></div>
    <div class="canvas-wrap">
      <canvas id="pane-2d" width="560" height="480"></canvas>
      <div id="info-window" hidden></div>
    </div>
    <canvas id="pane-3d" width="560" height="480"></canvas>
    <aside id="attribute-panel"></aside>`;
  return {
    dropdown: document.querySelector("#location-dropdown")!,
    canvas2d: document.querySelector("#pane-2d")!,
    canvas3d: document.querySelector("#pane-3d")!,
    attributePanel: document.querySelector("#attribute-panel")!,
    infoWindow: document.querySelector("#info-window")!,
    banner: document.querySelector("#error-banner")!,
    retryButton: document.querySelector("#retry-button")!,
  };
}

async function mountApp(): Promise<{ app: App; elements: AppElements }> {
  stubFetch();
  const elements = mountDom();
  const app = new App(new ApiClient(""), elements);
  await app.load();
  return { app, elements };
}

describe("load_and_render", () => {
  beforeEach(() => vi.unstubAllGlobals());

  it("fills the dropdown from the placemark list", async () => {
    const { elements } = await mountApp();
    const options = Array.from(elements.dropdown.options).map((o) => o.value);
    expect(options).toEqual(["", "town-hall", "old-palace", "mogaji-house",
                             "mosque", "church"]);
  });

  it("starts from the published initial views", async () => {
    const { app } = await mountApp();
    expect(app.sync.view2d).toEqual({ center: TOWN_HALL, zoom: 2 });
    expect(app.sync.view3d.heading_deg).toBe(5);
    expect(app.sync.view3d.tilt_deg).toBe(70);
    expect(app.sync.view3d.range_m).toBe(300);
  });

  it("shows the error banner when the server is down", async () => {
    vi.stubGlobal("fetch", vi.fn(async () => {
      throw new TypeError("fetch failed");
    }));
    const elements = mountDom();
    const app = new App(new ApiClient(""), elements);
    await app.load();
    expect(elements.banner.hidden).toBe(false);
    expect(elements.dropdown.options.length).toBe(0);
  });
});

describe("dropdown selection", () => {
  beforeEach(() => vi.unstubAllGlobals());

  it("centers both panes on the town hall and shows its prose", async () => {
    const { app, elements } = await mountApp();
    await app.selectPlacemark("town-hall");
    expect(app.sync.view2d.center).toEqual(TOWN_HALL);
    expect(app.sync.view3d.target.lat).toBe(TOWN_HALL.lat);
    expect(app.sync.view3d.target.lng).toBe(TOWN_HALL.lng);
    expect(app.sync.view2d.zoom).toBe(18);
    expect(app.pane2d.view.center).toEqual(TOWN_HALL);
    expect(app.pane3d.view.target.lat).toBe(TOWN_HALL.lat);
    expect(elements.attributePanel.textContent).toContain(TOWN_HALL_PROSE);
  });

  it("reselecting only advances the epoch", async () => {
    const { app } = await mountApp();
    await app.selectPlacemark("town-hall");
    const epoch = app.sync.epoch;
    const view2d = app.sync.view2d;
    await app.selectPlacemark("town-hall");
    expect(app.sync.epoch).toBe(epoch + 1);
    expect(app.sync.view2d).toEqual(view2d);
  });

  it("a second selection replaces the first", async () => {
    const { app } = await mountApp();
    await app.selectPlacemark("town-hall");
    await app.selectPlacemark("mosque");
    expect(app.selectedId).toBe("mosque");
    expect(app.sync.view2d.center.lat).toBeCloseTo(7.7359, 9);
  });
});

describe("marker clicks and info windows", () => {
  beforeEach(() => vi.unstubAllGlobals());

  it("clicking the town-hall marker opens exactly one info window with the prose",
     async () => {
    const { app, elements } = await mountApp();
    app.handleMapClick("pane-2d", TOWN_HALL);
    await vi.waitFor(() => expect(elements.infoWindow.hidden).toBe(false));
    expect(document.querySelectorAll("#info-window").length).toBe(1);
    expect(elements.infoWindow.textContent).toContain(TOWN_HALL_PROSE);
    expect(app.openInfoId).toBe("town-hall");
  });

  it("click on empty ground recenters instead of opening a window", async () => {
    const { app, elements } = await mountApp();
    await app.selectPlacemark("town-hall"); // zoom in so picking is local
    const before = app.sync.epoch;
    app.handleMapClick("pane-2d", { lat: 7.9, lng: 4.9 });
    expect(elements.infoWindow.hidden).toBe(true);
    expect(app.sync.epoch).toBe(before + 1);
    expect(app.sync.view2d.center).toEqual({ lat: 7.9, lng: 4.9 });
    expect(app.sync.view3d.target.lat).toBe(7.9); // other pane followed
  });

  it("opening a second window closes the first", async () => {
    const { app, elements } = await mountApp();
    app.handleMapClick("pane-2d", TOWN_HALL);
    await vi.waitFor(() => expect(app.openInfoId).toBe("town-hall"));
    app.handleMapClick("pane-2d", { lat: 7.7373, lng: 4.4365 }); // inside old-palace
    await vi.waitFor(() => expect(app.openInfoId).toBe("old-palace"));
    expect(document.querySelectorAll("#info-window").length).toBe(1);
    expect(elements.infoWindow.textContent).toContain("Old Palace");
  });
});

describe("pane camera events", () => {
  beforeEach(() => vi.unstubAllGlobals());

  it("a 2D pan mirrors into the 3D pane through the machine", async () => {
    const { app } = await mountApp();
    app.handleCameraChanged("pane-2d", { center: { lat: 7.75, lng: 4.4 }, zoom: 15 });
    expect(app.sync.view3d.target.lat).toBe(7.75);
    expect(app.pane3d.view.target.lat).toBe(7.75);
    expect(app.sync.view2d.zoom).toBe(15);
  });

  it("a 3D orbit mirrors into the 2D pane through the machine", async () => {
    const { app } = await mountApp();
    app.handleCameraChanged("pane-3d", {
      target: { lat: 7.7, lng: 4.5, alt_m: 0 },
      altitude_m: 10,
      altitude_mode: "relative-to-ground",
      heading_deg: 90,
      tilt_deg: 45,
      range_m: 2000,
    });
    expect(app.sync.view2d.center).toEqual({ lat: 7.7, lng: 4.5 });
    expect(app.pane2d.view.center).toEqual({ lat: 7.7, lng: 4.5 });
  });
});
