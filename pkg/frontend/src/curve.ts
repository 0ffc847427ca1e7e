import type { BudgetCurve } from "./api.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const W = 420;
const H = 220;
const PAD = 34;

/** Budget-sweep polyline: % of the zip's listings matching as the monthly
 * budget grows. A NO_DATA zip renders an explicit empty state. */
export class BudgetCurveView {
  constructor(private root: HTMLElement) {}

  render(curve: BudgetCurve): void {
    if (curve.pct_matched === null) {
      const empty = document.createElement("p");
      empty.className = "empty-state";
      empty.textContent = `No listings recorded for zip ${curve.zip} in this period.`;
      this.root.replaceChildren(empty);
      return;
    }

    const svg = document.createElementNS(SVG_NS, "svg");
    svg.setAttribute("viewBox", `0 0 ${W} ${H}`);
    svg.setAttribute("class", "budget-curve");

    const budgets = curve.budgets;
    const lo = budgets[0];
    const span = budgets[budgets.length - 1] - lo || 1;
    const x = (b: number) => PAD + ((b - lo) / span) * (W - 2 * PAD);
    const y = (pct: number) => H - PAD - (pct / 100) * (H - 2 * PAD);

    const axis = document.createElementNS(SVG_NS, "path");
    axis.setAttribute("d", `M${PAD},${y(100)} L${PAD},${y(0)} L${x(budgets[budgets.length - 1])},${y(0)}`);
    axis.setAttribute("class", "axis");
    axis.setAttribute("fill", "none");
    axis.setAttribute("stroke", "#666");
    svg.appendChild(axis);

    const line = document.createElementNS(SVG_NS, "polyline");
    line.setAttribute("points", budgets
      .map((b, i) => `${x(b).toFixed(1)},${y(curve.pct_matched![i]).toFixed(1)}`)
      .join(" "));
    line.setAttribute("fill", "none");
    line.setAttribute("stroke", "#c62828");
    line.setAttribute("stroke-width", "2");
    line.setAttribute("data-role", "curve");
    svg.appendChild(line);

    for (let i = 0; i < budgets.length; i++) {
      const dot = document.createElementNS(SVG_NS, "circle");
      dot.setAttribute("cx", x(budgets[i]).toFixed(1));
      dot.setAttribute("cy", y(curve.pct_matched[i]).toFixed(1));
      dot.setAttribute("r", "3");
      dot.setAttribute("data-budget", String(budgets[i]));
      dot.setAttribute("data-pct", curve.pct_matched[i].toFixed(2));
      const title = document.createElementNS(SVG_NS, "title");
      title.textContent = `<= ${budgets[i]} CHF: ${curve.pct_matched[i].toFixed(1)}%`;
      dot.appendChild(title);
      svg.appendChild(dot);
    }

    const caption = document.createElement("p");
    caption.className = "caption";
    caption.textContent =
      `Zip ${curve.zip}: share of all ${curve.n_total} listings matching as the budget grows.`;
    this.root.replaceChildren(svg, caption);
  }

  /** The plotted pct at one budget (from the rendered DOM), for tests. */
  pctAt(budget: number): number | null {
    const dot = this.root.querySelector(`circle[data-budget="${budget}"]`);
    return dot ? Number(dot.getAttribute("data-pct")) : null;
  }
}
