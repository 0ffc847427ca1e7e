import { ApiClient } from "./api.js";
import { ChoroplethView } from "./choropleth.js";
import { BudgetCurveView } from "./curve.js";
import { Debouncer } from "./debounce.js";
import { EstimatePanel } from "./estimate.js";
import { coverZips, loadGeometry, ZipGeometry } from "./geometry.js";
import { HistogramsView } from "./histograms.js";
import { LatestRequest } from "./requests.js";
import { ExplorerState } from "./state.js";

const DEBOUNCE_MS = 300;
const CURVE_BUDGETS = [1000, 1500, 2000, 2500, 3000, 3500, 4000, 5000, 6000, 8000];

/** Wires the explorer: one debouncer + request slot per view, so slider
 * drags coalesce into a single superseding fetch and stale responses are
 * never painted. */
export class ExplorerApp {
  readonly state = new ExplorerState();
  readonly choropleth: ChoroplethView;
  readonly curveView: BudgetCurveView;
  readonly histogramsView: HistogramsView;
  readonly estimatePanel: EstimatePanel;

  readonly availabilityDebounce: Debouncer;
  readonly availabilityRequest = new LatestRequest();
  readonly detailDebounce: Debouncer;
  readonly detailRequest = new LatestRequest();

  private geometry: ZipGeometry = { format: "zip-rings-v1", features: [] };

  constructor(readonly api: ApiClient, private dom: {
    map: HTMLElement;
    curve: HTMLElement;
    histograms: HTMLElement;
    estimate: HTMLElement;
    banner: HTMLElement;
    detailTitle: HTMLElement;
  }, debounceMs = DEBOUNCE_MS) {
    this.availabilityDebounce = new Debouncer(debounceMs);
    this.detailDebounce = new Debouncer(debounceMs);
    this.choropleth = new ChoroplethView(dom.map, (zip) => this.selectZip(zip));
    this.curveView = new BudgetCurveView(dom.curve);
    this.histogramsView = new HistogramsView(dom.histograms);
    this.estimatePanel = new EstimatePanel(dom.estimate, api,
                                           (msg) => this.showBanner(msg, false));
  }

  async start(geometryUrl: string): Promise<void> {
    try {
      this.geometry = await loadGeometry(geometryUrl);
    } catch (err) {
      this.showBanner(`zip geometry unavailable: ${(err as Error).message}`, true);
    }
    await this.refreshAvailability();
  }

  /** Slider/input change entry point: clamp, then debounce the re-query. */
  controlsChanged(next: Partial<{ minRooms: number; minSpace: number; maxRent: number }>): void {
    this.state.setControls(next);
    this.availabilityDebounce.run(() => void this.refreshAvailability());
    if (this.state.selectedZip !== null) {
      this.detailDebounce.run(() => void this.refreshDetail());
    }
  }

  async refreshAvailability(): Promise<void> {
    const controls = { ...this.state.controls };
    const outcome = await this.availabilityRequest
      .run((signal) => this.api.availability(controls, signal))
      .catch((err: Error) => { this.showBanner(`availability: ${err.message}`, true); });
    if (!outcome || outcome === "stale") return; // superseded or failed: keep last view
    this.state.lastAvailability = outcome;
    const zips = Object.keys(outcome.by_zip).map(Number);
    this.choropleth.render(coverZips(this.geometry, zips), outcome);
    this.clearBanner();
  }

  selectZip(zip: number): void {
    this.state.selectedZip = zip;
    this.dom.detailTitle.textContent = `Zip ${zip}`;
    void this.refreshDetail();
  }

  async refreshDetail(): Promise<void> {
    const zip = this.state.selectedZip;
    if (zip === null) return;
    const { minRooms, minSpace } = this.state.controls;
    const [lowBudget, highBudget] = this.state.comparisonBudgets;

    const outcome = await this.detailRequest.run(async (signal) => {
      const curve = await this.api.budgetSweep(zip, minRooms, minSpace,
                                               CURVE_BUDGETS, signal);
      const low = await this.api.histograms(zip, {
        minRooms, minSpace, maxRent: lowBudget }, 16, signal);
      const high = await this.api.histograms(zip, {
        minRooms, minSpace, maxRent: highBudget }, 16, signal);
      return { curve, low, high };
    }).catch((err: Error) => { this.showBanner(`zip detail: ${err.message}`, true); });
    if (!outcome || outcome === "stale") return;

    this.state.lastCurve = outcome.curve;
    this.state.lastHistograms = [outcome.low, outcome.high];
    this.curveView.render(outcome.curve);
    this.histogramsView.render([
      { label: `max ${lowBudget} CHF`, data: outcome.low },
      { label: `max ${highBudget} CHF`, data: outcome.high },
    ]);
    this.clearBanner();
  }

  showBanner(message: string, isError: boolean): void {
    this.dom.banner.textContent = message;
    this.dom.banner.className = isError ? "banner error" : "banner info";
  }

  clearBanner(): void {
    this.dom.banner.textContent = "";
    this.dom.banner.className = "banner";
  }
}

/** Browser entry point; test environments construct ExplorerApp directly. */
export function mount(): void {
  const grab = (id: string): HTMLElement => {
    const el = document.getElementById(id);
    if (!el) throw new Error(`missing #${id}`);
    return el;
  };
  const app = new ExplorerApp(new ApiClient(""), {
    map: grab("map"),
    curve: grab("curve"),
    histograms: grab("histograms"),
    estimate: grab("estimate"),
    banner: grab("banner"),
    detailTitle: grab("detail-title"),
  });

  const bind = (id: string, key: "minRooms" | "minSpace" | "maxRent") => {
    const input = grab(id) as HTMLInputElement;
    const label = grab(`${id}-value`);
    const update = () => {
      label.textContent = input.value;
      app.controlsChanged({ [key]: Number(input.value) });
    };
    input.addEventListener("input", update);
    label.textContent = input.value;
  };
  bind("min-rooms", "minRooms");
  bind("min-space", "minSpace");
  bind("max-rent", "maxRent");

  void app.start("./assets/zip-geometry.json");
}

declare global {
  interface Window { __AVM_NO_AUTOMOUNT__?: boolean }
}

if (typeof document !== "undefined" && !window.__AVM_NO_AUTOMOUNT__
    && document.getElementById("map")) {
  mount();
}
