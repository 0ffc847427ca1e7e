/** Continuous 0-100% availability scale (light to saturated blue); zips
 * without data render gray, never as 0%. */

export const NO_DATA_COLOR = "#9e9e9e";

const LOW = [0xf7, 0xfb, 0xff];
const HIGH = [0x08, 0x51, 0x9c];

export function availabilityColor(pct: number | null): string {
  if (pct === null || !Number.isFinite(pct)) return NO_DATA_COLOR;
  const t = Math.min(100, Math.max(0, pct)) / 100;
  const channel = (i: number) => Math.round(LOW[i] + (HIGH[i] - LOW[i]) * t);
  return `#${[0, 1, 2].map((i) => channel(i).toString(16).padStart(2, "0")).join("")}`;
}
