import type { Availability, BudgetCurve, Estimate, Histograms, MarketControls } from "./api.js";

/** Client-side mirror of the server's listing validation bounds; sliders
 * and the estimate form clamp/check against these before any request. */
export const BOUNDS = {
  rooms: { min: 0.5, max: 30 },
  space: { min: 6, max: 2000 },
  rent: { min: 101, max: 100000 },
  zip: { min: 1000, max: 9699 },
  floor: { min: -3, max: 50 },
  year: { min: 1200, max: new Date().getFullYear() },
  lat: { min: 45.7, max: 48.0 },
  lng: { min: 5.8, max: 10.7 },
} as const;

export const PROPERTY_TYPES = ["apartment", "duplex", "single_house", "studio"] as const;
export const MODELS = ["rf", "knn", "ols", "bridge", "lp1", "lp2", "lp3"] as const;

export function clamp(value: number, range: { min: number; max: number }): number {
  return Math.min(range.max, Math.max(range.min, value));
}

/** Everything the explorer currently shows; views render from here only. */
export class ExplorerState {
  controls: MarketControls = { minRooms: 3, minSpace: 50, maxRent: 3000 };
  selectedZip: number | null = null;
  selectedModel: string = "rf";
  comparisonBudgets: [number, number] = [3000, 5000];

  lastAvailability: Availability | null = null;
  lastCurve: BudgetCurve | null = null;
  lastHistograms: [Histograms | null, Histograms | null] = [null, null];
  lastEstimate: Estimate | null = null;

  setControls(next: Partial<MarketControls>): void {
    const merged = { ...this.controls, ...next };
    merged.minRooms = clamp(merged.minRooms, BOUNDS.rooms);
    merged.minSpace = clamp(merged.minSpace, BOUNDS.space);
    merged.maxRent = clamp(merged.maxRent, BOUNDS.rent);
    this.controls = merged;
  }
}

export interface FormIssue {
  field: string;
  message: string;
}

/** Mirror of the server-side rules for the estimate form; a form that
 * fails here is never sent. */
export function validateEstimateForm(form: {
  type: string; rooms: number; floor: number; space: number;
  year: number; zip: number; lng: number; lat: number;
}): FormIssue[] {
  const issues: FormIssue[] = [];
  const check = (field: string, value: number, range: { min: number; max: number }) => {
    if (!Number.isFinite(value) || value < range.min || value > range.max) {
      issues.push({ field, message: `${field} must be within [${range.min}, ${range.max}]` });
    }
  };
  if (!(PROPERTY_TYPES as readonly string[]).includes(form.type)) {
    issues.push({ field: "type", message: `type must be one of ${PROPERTY_TYPES.join(", ")}` });
  }
  check("rooms", form.rooms, BOUNDS.rooms);
  check("floor", form.floor, BOUNDS.floor);
  check("space", form.space, BOUNDS.space);
  check("year", form.year, BOUNDS.year);
  check("zip", form.zip, BOUNDS.zip);
  check("lng", form.lng, BOUNDS.lng);
  check("lat", form.lat, BOUNDS.lat);
  return issues;
}
