import type { Availability } from "./api.js";
import { availabilityColor, NO_DATA_COLOR } from "./color.js";
import type { ZipFeature } from "./geometry.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const VIEW_W = 760;
const VIEW_H = 520;

/** SVG choropleth of zip polygons colored by availability percentage.
 * Zips absent from the response (or with null pct) render gray. Hovering
 * shows zip, totals and pct; clicking fires the selection callback. */
export class ChoroplethView {
  renderCount = 0;

  constructor(private root: HTMLElement,
              private onSelect: (zip: number) => void) {}

  render(features: ZipFeature[], availability: Availability): void {
    this.renderCount += 1;
    const project = makeProjection(features);

    const svg = document.createElementNS(SVG_NS, "svg");
    svg.setAttribute("viewBox", `0 0 ${VIEW_W} ${VIEW_H}`);
    svg.setAttribute("class", "choropleth");

    for (const feature of features) {
      const stats = availability.by_zip[String(feature.zip)];
      const pct = stats ? stats.pct : null;

      const path = document.createElementNS(SVG_NS, "path");
      path.setAttribute("d", ringPath(feature.ring, project));
      path.setAttribute("fill", availabilityColor(pct));
      path.setAttribute("stroke", "#ffffff");
      path.setAttribute("data-zip", String(feature.zip));
      path.setAttribute("data-pct", pct === null ? "no-data" : pct.toFixed(2));

      const title = document.createElementNS(SVG_NS, "title");
      title.textContent = stats && stats.pct !== null
        ? `${feature.zip}: ${stats.n_match} of ${stats.n_total} match (${stats.pct.toFixed(1)}%)`
        : `${feature.zip}: no data`;
      path.appendChild(title);

      path.addEventListener("click", () => this.onSelect(feature.zip));
      svg.appendChild(path);
    }

    this.root.replaceChildren(svg);
  }

  /** Fill color of one zip's polygon, for tests and the legend. */
  fillOf(zip: number): string | null {
    const path = this.root.querySelector(`path[data-zip="${zip}"]`);
    return path ? path.getAttribute("fill") : null;
  }
}

export { NO_DATA_COLOR };

function makeProjection(features: ZipFeature[]) {
  let minLng = Infinity, maxLng = -Infinity, minLat = Infinity, maxLat = -Infinity;
  for (const f of features) {
    for (const [lng, lat] of f.ring) {
      minLng = Math.min(minLng, lng);
      maxLng = Math.max(maxLng, lng);
      minLat = Math.min(minLat, lat);
      maxLat = Math.max(maxLat, lat);
    }
  }
  const spanLng = maxLng - minLng || 1;
  const spanLat = maxLat - minLat || 1;
  const pad = 10;
  return (lng: number, lat: number): [number, number] => [
    pad + ((lng - minLng) / spanLng) * (VIEW_W - 2 * pad),
    pad + ((maxLat - lat) / spanLat) * (VIEW_H - 2 * pad), // lat grows upward
  ];
}

function ringPath(ring: [number, number][],
                  project: (lng: number, lat: number) => [number, number]): string {
  return ring
    .map(([lng, lat], i) => {
      const [x, y] = project(lng, lat);
      return `${i === 0 ? "M" : "L"}${x.toFixed(1)},${y.toFixed(1)}`;
    })
    .join(" ") + " Z";
}
