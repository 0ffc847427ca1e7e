import type { Histograms } from "./api.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const W = 420;
const H = 130;
const PAD = 6;

const DIMENSION_LABELS: Record<string, string> = {
  rooms: "rooms",
  living_space_m2: "living space (m2)",
  gross_rent_chf: "gross rent (CHF)",
};

/** Matched-on-total histograms: hollow bars for the whole zip, filled red
 * bars for the listings matching the query, identical bin edges, so the
 * red bar never exceeds its white background bar. In comparison mode two
 * budget variants render as stacked rows. */
export class HistogramsView {
  constructor(private root: HTMLElement) {}

  render(rows: { label: string; data: Histograms }[]): void {
    const blocks: HTMLElement[] = [];
    for (const { label, data } of rows) {
      const block = document.createElement("section");
      block.className = "histogram-row";
      block.dataset.label = label;

      const heading = document.createElement("h3");
      heading.textContent =
        `${label}: ${data.n_match} of ${data.n_total} listings match`;
      block.appendChild(heading);

      for (const [name, dim] of Object.entries(data.dimensions)) {
        const figure = document.createElement("figure");
        figure.dataset.dimension = name;
        figure.appendChild(this.renderDimension(name, dim.total_counts,
                                                dim.matched_counts));
        const caption = document.createElement("figcaption");
        caption.textContent = DIMENSION_LABELS[name] ?? name;
        figure.appendChild(caption);
        block.appendChild(figure);
      }
      blocks.push(block);
    }
    this.root.replaceChildren(...blocks);
  }

  private renderDimension(name: string, totals: number[], matched: number[]) {
    const svg = document.createElementNS(SVG_NS, "svg");
    svg.setAttribute("viewBox", `0 0 ${W} ${H}`);
    svg.setAttribute("class", "histogram");
    const peak = Math.max(...totals, 1);
    const barW = (W - 2 * PAD) / totals.length;

    totals.forEach((total, i) => {
      const x = PAD + i * barW;
      svg.appendChild(this.bar(x, barW, total, peak, "total", name, i));
      svg.appendChild(this.bar(x, barW, matched[i], peak, "matched", name, i));
    });
    return svg;
  }

  private bar(x: number, barW: number, count: number, peak: number,
              role: "total" | "matched", dimension: string, bin: number) {
    const h = (count / peak) * (H - 2 * PAD);
    const rect = document.createElementNS(SVG_NS, "rect");
    rect.setAttribute("x", (x + (role === "matched" ? barW * 0.15 : 0)).toFixed(1));
    rect.setAttribute("y", (H - PAD - h).toFixed(1));
    rect.setAttribute("width", (barW * (role === "matched" ? 0.7 : 1) - 1).toFixed(1));
    rect.setAttribute("height", h.toFixed(1));
    rect.setAttribute("class", role);
    rect.setAttribute("fill", role === "matched" ? "#c62828" : "#ffffff");
    rect.setAttribute("stroke", "#777");
    rect.setAttribute("data-role", role);
    rect.setAttribute("data-dimension", dimension);
    rect.setAttribute("data-bin", String(bin));
    rect.setAttribute("data-count", String(count));
    return rect;
  }

  /** [matched, total] counts per bin of one rendered row, for tests. */
  counts(label: string, dimension: string): Array<[number, number]> {
    const row = this.root.querySelector(`section[data-label="${label}"]`);
    if (!row) return [];
    const read = (role: string) =>
      Array.from(row.querySelectorAll(
        `rect[data-role="${role}"][data-dimension="${dimension}"]`))
        .map((r) => Number(r.getAttribute("data-count")));
    const matched = read("matched");
    const totals = read("total");
    return matched.map((m, i) => [m, totals[i]]);
  }
}
