import { ApiClient } from "./api.js";
import { App, type AppElements } from "./app.js";

function mustGet<T extends Element>(selector: string): T {
  const el = document.querySelector<T>(selector);
  if (!el) throw new Error(`missing element ${selector}`);
  return el;
}

function mount(): void {
  const elements: AppElements = {
    dropdown: mustGet<HTMLSelectElement>("#location-dropdown"),
    canvas2d: mustGet<HTMLCanvasElement>("#pane-2d"),
    canvas3d: mustGet<HTMLCanvasElement>("#pane-3d"),
    attributePanel: mustGet<HTMLElement>("#attribute-panel"),
    infoWindow: mustGet<HTMLElement>("#info-window"),
    banner: mustGet<HTMLElement>("#error-banner"),
    retryButton: mustGet<HTMLButtonElement>("#retry-button"),
  };
  const app = new App(new ApiClient(""), elements);
  void app.load();
}

if (document.readyState === "loading") {
  document.addEventListener("DOMContentLoaded", mount);
} else {
  mount();
}
