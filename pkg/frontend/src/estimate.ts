import { ApiClient, ApiError, Estimate, EstimateForm } from "./api.js";
import { MODELS, PROPERTY_TYPES, validateEstimateForm } from "./state.js";

const DIRECTIONS = [
  ["too_high", "Too high"],
  ["too_low", "Too low"],
  ["about_right", "About right"],
] as const;

const REASONS = ["condition", "view", "noise", "renovation", "other"] as const;

/** Estimate form plus the feedback controls shown once an estimate is on
 * screen. Field values are checked against the client-side bound mirror
 * first; an invalid form never leaves the browser. */
export class EstimatePanel {
  private form: HTMLFormElement;
  private result: HTMLElement;
  private errors: HTMLElement;
  private feedbackBox: HTMLElement;
  private lastEstimate: Estimate | null = null;
  private lastForm: EstimateForm | null = null;

  constructor(private root: HTMLElement, private api: ApiClient,
              private notify: (message: string) => void) {
    this.form = document.createElement("form");
    this.form.noValidate = true;
    this.form.innerHTML = `
      <label>type <select name="type">${PROPERTY_TYPES.map(
        (t) => `<option>${t}</option>`).join("")}</select></label>
      <label>rooms <input name="rooms" type="number" step="0.5" value="3.5"></label>
      <label>floor <input name="floor" type="number" value="2"></label>
      <label>living space m2 <input name="space" type="number" value="80"></label>
      <label>year built <input name="year" type="number" value="1990"></label>
      <label>zip <input name="zip" type="number" value="8005"></label>
      <label>lng <input name="lng" type="number" step="0.0001" value="8.54"></label>
      <label>lat <input name="lat" type="number" step="0.0001" value="47.38"></label>
      <label>model <select name="model">${MODELS.map(
        (m) => `<option>${m}</option>`).join("")}</select></label>
      <button type="submit">Estimate</button>
    `;
    this.errors = document.createElement("ul");
    this.errors.className = "form-errors";
    this.result = document.createElement("div");
    this.result.className = "estimate-result";
    this.feedbackBox = document.createElement("div");
    this.feedbackBox.className = "feedback";
    this.root.replaceChildren(this.form, this.errors, this.result, this.feedbackBox);

    this.form.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.submit();
    });
  }

  readForm(): { form: EstimateForm; model: string } {
    const data = new FormData(this.form);
    const num = (name: string) => Number(data.get(name));
    return {
      form: {
        type: String(data.get("type")),
        rooms: num("rooms"),
        floor: num("floor"),
        space: num("space"),
        year: num("year"),
        zip: num("zip"),
        lng: num("lng"),
        lat: num("lat"),
      },
      model: String(data.get("model")),
    };
  }

  showErrors(items: { field: string; message: string }[]): void {
    this.errors.replaceChildren(...items.map(({ field, message }) => {
      const li = document.createElement("li");
      li.dataset.field = field;
      li.textContent = message;
      return li;
    }));
  }

  async submit(): Promise<void> {
    const { form, model } = this.readForm();
    const issues = validateEstimateForm(form);
    this.showErrors(issues);
    if (issues.length > 0) return; // invalid form: no request

    try {
      const estimate = await this.api.estimate(form, model);
      this.lastEstimate = estimate;
      this.lastForm = form;
      this.result.textContent =
        `${estimate.estimate_chf.toFixed(0)} CHF/month (${estimate.model})`;
      this.result.dataset.estimate = String(estimate.estimate_chf);
      this.renderFeedbackControls();
    } catch (err) {
      if (err instanceof ApiError) {
        this.showErrors(err.errors);
      } else {
        this.notify(`estimate failed: ${(err as Error).message}`);
      }
    }
  }

  private renderFeedbackControls(): void {
    const reason = document.createElement("select");
    reason.name = "reason";
    reason.innerHTML = `<option value="">reason (optional)</option>` +
      REASONS.map((r) => `<option>${r}</option>`).join("");

    const text = document.createElement("input");
    text.name = "free_text";
    text.maxLength = 1000;
    text.placeholder = "details (optional)";

    const buttons = DIRECTIONS.map(([value, label]) => {
      const button = document.createElement("button");
      button.type = "button";
      button.dataset.direction = value;
      button.textContent = label;
      button.addEventListener("click", () => void this.sendFeedback(
        value, reason.value || undefined, text.value || undefined));
      return button;
    });
    this.feedbackBox.replaceChildren(...buttons, reason, text);
  }

  async sendFeedback(direction: "too_high" | "too_low" | "about_right",
                     reason?: string, freeText?: string): Promise<void> {
    if (!this.lastEstimate || !this.lastForm) return;
    await this.api.feedback({
      query_echo: { ...this.lastForm, model: this.lastEstimate.model },
      estimate_chf: this.lastEstimate.estimate_chf,
      user_direction: direction,
      reason_code: reason as never,
      free_text: freeText,
    });
    this.notify("Thanks, your feedback was recorded.");
  }
}
