// @vitest-environment jsdom
// End-to-end against the seeded local API spawned by globalSetup.
import { readFileSync } from "node:fs";
import { beforeEach, describe, expect, it, vi } from "vitest";

import { ApiClient } from "../src/api.js";
import { NO_DATA_COLOR } from "../src/choropleth.js";
import { ExplorerApp } from "../src/app.js";
import { EstimatePanel } from "../src/estimate.js";

const BASE = process.env.AVM_API_BASE!;
const FEEDBACK_PATH = process.env.AVM_FEEDBACK_PATH!;
const FIXTURE_ZIPS: number[] = JSON.parse(process.env.AVM_FIXTURE_ZIPS ?? "[]");
const ABSENT_ZIP = 9611; // inside the Swiss range, never in the fixture

function makeApp(debounceMs = 120) {
  document.body.innerHTML = `
    <div id="map"></div><div id="curve"></div><div id="histograms"></div>
    <div id="estimate"></div><div id="banner"></div><h2 id="detail-title"></h2>`;
  const api = new ApiClient(BASE);
  const app = new ExplorerApp(api, {
    map: document.getElementById("map")!,
    curve: document.getElementById("curve")!,
    histograms: document.getElementById("histograms")!,
    estimate: document.getElementById("estimate")!,
    banner: document.getElementById("banner")!,
    detailTitle: document.getElementById("detail-title")!,
  }, debounceMs);
  return { app, api };
}

beforeEach(() => {
  window.__AVM_NO_AUTOMOUNT__ = true;
});

describe("explorer against the live API", () => {
  it("a burst of budget-slider changes issues exactly one superseding request "
     + "and re-renders the choropleth", async () => {
    const { app, api } = makeApp();
    await app.refreshAvailability();
    expect(app.choropleth.renderCount).toBe(1);

    const requestsBefore = api.requestCount;
    const rendersBefore = app.choropleth.renderCount;

    for (const rent of [2900, 2800, 2700, 2600, 2500, 2400]) {
      app.controlsChanged({ maxRent: rent });
    }
    await vi.waitFor(() => {
      expect(app.choropleth.renderCount).toBe(rendersBefore + 1);
    }, { timeout: 10_000 });
    await new Promise((res) => setTimeout(res, 300)); // no trailing extras

    expect(api.requestCount).toBe(requestsBefore + 1);
    expect(app.choropleth.renderCount).toBe(rendersBefore + 1);
    expect(app.state.controls.maxRent).toBe(2400);
  });

  it("a zip with no listings renders gray", async () => {
    const { app } = makeApp();
    app.state.setControls({ zips: [ABSENT_ZIP, FIXTURE_ZIPS[0]] } as never);
    await app.refreshAvailability();
    expect(app.choropleth.fillOf(ABSENT_ZIP)).toBe(NO_DATA_COLOR);
    expect(app.choropleth.fillOf(FIXTURE_ZIPS[0])).not.toBe(NO_DATA_COLOR);
  });

  it("tightening the budget never raises any zip's availability", async () => {
    const api = new ApiClient(BASE);
    const loose = await api.availability({ minRooms: 2, minSpace: 40, maxRent: 4000 });
    const tight = await api.availability({ minRooms: 2, minSpace: 40, maxRent: 2500 });
    for (const [zip, stats] of Object.entries(tight.by_zip)) {
      const before = loose.by_zip[zip];
      expect(stats.n_match).toBeLessThanOrEqual(before.n_match);
    }
  });

  it("the 3000/5000 CHF comparison renders matched <= total in every bin",
     async () => {
    const { app } = makeApp();
    await app.refreshAvailability();
    const withData = Object.entries(app.state.lastAvailability!.by_zip)
      .filter(([, s]) => s.n_total >= 20)
      .map(([zip]) => Number(zip))[0];

    app.state.comparisonBudgets = [3000, 5000];
    app.selectZip(withData);
    await vi.waitFor(() => {
      expect(app.state.lastHistograms[1]).not.toBeNull();
    }, { timeout: 10_000 });

    const dims = ["rooms", "living_space_m2", "gross_rent_chf"];
    for (const label of ["max 3000 CHF", "max 5000 CHF"]) {
      for (const dim of dims) {
        const pairs = app.histogramsView.counts(label, dim);
        expect(pairs.length).toBeGreaterThan(0);
        for (const [matched, total] of pairs) {
          expect(matched).toBeLessThanOrEqual(total);
        }
      }
    }
    // relaxing the budget can only match more listings
    expect(app.state.lastHistograms[0]!.n_match)
      .toBeLessThanOrEqual(app.state.lastHistograms[1]!.n_match);
    // the curve view rendered alongside
    expect(document.querySelector("#curve svg")).not.toBeNull();
  });

  it("feedback returns 201 and lands in the feedback log", async () => {
    document.body.innerHTML = "<div id='panel'></div><div id='note'></div>";
    const notices: string[] = [];
    const panel = new EstimatePanel(document.getElementById("panel")!,
                                    new ApiClient(BASE), (m) => notices.push(m));
    await panel.submit();
    const estimate = (document.querySelector(".estimate-result") as HTMLElement)
      .dataset.estimate;
    expect(Number(estimate)).toBeGreaterThan(0);

    const marker = `e2e-${Date.now()}`;
    await panel.sendFeedback("too_high", "noise", marker);
    const log = readFileSync(FEEDBACK_PATH, "utf-8").trim().split("\n");
    const last = JSON.parse(log[log.length - 1]);
    expect(last.user_direction).toBe("too_high");
    expect(last.reason_code).toBe("noise");
    expect(last.free_text).toBe(marker);
    expect(last.estimate_chf).toBe(Number(estimate));
    expect(notices.some((n) => n.includes("recorded"))).toBe(true);
  });

  it("estimates equal for every loaded model and echo the version tag", async () => {
    const api = new ApiClient(BASE);
    for (const model of ["rf", "knn", "ols"]) {
      const got = await api.estimate({
        type: "apartment", rooms: 3.5, floor: 2, space: 80,
        year: 1990, zip: 8005, lng: 8.54, lat: 47.38,
      }, model);
      expect(got.model).toBe(model);
      expect(got.estimate_chf).toBeGreaterThan(0);
      expect(got.model_version).toBeTruthy();
    }
  });
});
