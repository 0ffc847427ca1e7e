/** Zip boundary geometry for the choropleth.
 *
 * Bundled format ("zip-rings-v1"): a JSON object with a `features` array of
 * `{zip, ring}` where `ring` is a closed list of [lng, lat] vertices. The
 * shipped asset covers the demo market's zip blocks; swap in a full Swiss
 * boundary file with the same shape for production. Zips that appear in an
 * availability response but not in the geometry get deterministic fallback
 * tiles below the mapped area, so data is never silently dropped. */

export interface ZipFeature {
  zip: number;
  ring: [number, number][]; // [lng, lat], first vertex repeated last
}

export interface ZipGeometry {
  format: string;
  features: ZipFeature[];
}

export async function loadGeometry(url: string): Promise<ZipGeometry> {
  const resp = await fetch(url);
  if (!resp.ok) throw new Error(`geometry fetch failed: HTTP ${resp.status}`);
  const body = (await resp.json()) as ZipGeometry;
  if (body.format !== "zip-rings-v1" || !Array.isArray(body.features)) {
    throw new Error("unsupported zip geometry format");
  }
  return body;
}

function tile(zip: number, lng: number, lat: number, w: number, h: number): ZipFeature {
  return {
    zip,
    ring: [[lng, lat], [lng + w, lat], [lng + w, lat + h], [lng, lat + h], [lng, lat]],
  };
}

/** Deterministic fallback tiles for zips missing from the bundled file. */
export function fallbackTiles(zips: number[], below: { lng: number; lat: number }): ZipFeature[] {
  const sorted = [...zips].sort((a, b) => a - b);
  return sorted.map((zip, i) =>
    tile(zip, below.lng + (i % 8) * 0.022, below.lat - 0.03 - Math.floor(i / 8) * 0.022,
         0.02, 0.02));
}

/** Merge bundled features with fallback tiles for any uncovered zips. */
export function coverZips(geometry: ZipGeometry, zips: number[]): ZipFeature[] {
  const covered = new Set(geometry.features.map((f) => f.zip));
  const missing = zips.filter((z) => !covered.has(z));
  if (missing.length === 0) return geometry.features;
  let minLng = Infinity;
  let minLat = Infinity;
  for (const f of geometry.features) {
    for (const [lng, lat] of f.ring) {
      minLng = Math.min(minLng, lng);
      minLat = Math.min(minLat, lat);
    }
  }
  if (!Number.isFinite(minLng)) {
    minLng = 8.5;
    minLat = 47.4;
  }
  return [...geometry.features, ...fallbackTiles(missing, { lng: minLng, lat: minLat })];
}
