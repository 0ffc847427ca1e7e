/** Typed client for the /api/v1 endpoints. The UI never computes listing
 * statistics itself; every rendered number comes from one of these
 * response shapes. */

export interface ZipStats {
  n_total: number;
  n_match: number;
  pct: number | null; // null = NO_DATA
}

export interface Availability {
  by_zip: Record<string, ZipStats>;
}

export interface BudgetCurve {
  zip: number;
  budgets: number[];
  pct_matched: number[] | null; // null = NO_DATA
  n_total: number;
}

export interface DimensionHistogram {
  bin_edges: number[];
  total_counts: number[];
  matched_counts: number[];
}

export interface Histograms {
  zip: number;
  n_total: number;
  n_match: number;
  dimensions: Record<string, DimensionHistogram>;
}

export interface Estimate {
  estimate_chf: number;
  model: string;
  model_version: string | null;
}

export interface FieldError {
  field: string;
  message: string;
}

export interface MarketControls {
  minRooms: number;
  minSpace: number;
  maxRent: number;
  from?: string;
  to?: string;
  zips?: number[];
}

export interface EstimateForm {
  type: string;
  rooms: number;
  floor: number;
  space: number;
  year: number;
  zip: number;
  lng: number;
  lat: number;
}

export interface FeedbackBody {
  query_echo: Record<string, unknown>;
  estimate_chf: number;
  user_direction: "too_high" | "too_low" | "about_right";
  reason_code?: "condition" | "view" | "noise" | "renovation" | "other";
  free_text?: string;
}

export class ApiError extends Error {
  constructor(public status: number, public errors: FieldError[]) {
    super(errors.map((e) => `${e.field}: ${e.message}`).join("; ") || `HTTP ${status}`);
  }
}

async function parseError(resp: Response): Promise<ApiError> {
  let errors: FieldError[] = [];
  try {
    const body = await resp.json();
    if (Array.isArray(body.errors)) errors = body.errors;
  } catch {
    // non-JSON error body; status alone will have to do
  }
  return new ApiError(resp.status, errors);
}

export class ApiClient {
  /** Total fetches issued; the e2e tests assert on this. */
  requestCount = 0;

  constructor(private base: string = "") {}

  private async getJson<T>(path: string, signal?: AbortSignal): Promise<T> {
    this.requestCount += 1;
    const resp = await fetch(this.base + path, { signal });
    if (!resp.ok) throw await parseError(resp);
    return (await resp.json()) as T;
  }

  private async postJson<T>(path: string, body: unknown, signal?: AbortSignal): Promise<T> {
    this.requestCount += 1;
    const resp = await fetch(this.base + path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
      signal,
    });
    if (!resp.ok) throw await parseError(resp);
    return (await resp.json()) as T;
  }

  availability(controls: MarketControls, signal?: AbortSignal): Promise<Availability> {
    return this.postJson("/api/v1/analytics/zip-availability", {
      min_rooms: controls.minRooms,
      min_living_space_m2: controls.minSpace,
      max_rent_chf: controls.maxRent,
      from: controls.from,
      to: controls.to,
      zips: controls.zips,
    }, signal);
  }

  budgetSweep(zip: number, minRooms: number, minSpace: number, budgets: number[],
              signal?: AbortSignal): Promise<BudgetCurve> {
    return this.postJson("/api/v1/analytics/budget-sweep", {
      zip, min_rooms: minRooms, min_space: minSpace, budgets,
    }, signal);
  }

  histograms(zip: number, controls: MarketControls, nBins = 16,
             signal?: AbortSignal): Promise<Histograms> {
    return this.postJson("/api/v1/analytics/histograms", {
      zip,
      n_bins: nBins,
      query: {
        min_rooms: controls.minRooms,
        min_living_space_m2: controls.minSpace,
        max_rent_chf: controls.maxRent,
        from: controls.from,
        to: controls.to,
      },
    }, signal);
  }

  estimate(form: EstimateForm, model: string, signal?: AbortSignal): Promise<Estimate> {
    const params = new URLSearchParams({
      type: form.type,
      rooms: String(form.rooms),
      floor: String(form.floor),
      space: String(form.space),
      year: String(form.year),
      zip: String(form.zip),
      lng: String(form.lng),
      lat: String(form.lat),
      model,
    });
    return this.getJson(`/api/v1/estimate?${params}`, signal);
  }

  async feedback(body: FeedbackBody): Promise<void> {
    this.requestCount += 1;
    const resp = await fetch(this.base + "/api/v1/feedback", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    if (resp.status !== 201) throw await parseError(resp);
  }

  health(): Promise<{ status: string; models: string[] }> {
    return this.getJson("/api/v1/healthz");
  }
}
