/** Plain scaled 2-D projection of victim geotags onto a fixed viewport.
 *
 *  No map tiles and no external mapping service: the field is small enough
 *  that linear lat/lon scaling over the victims' bounding box reads fine,
 *  and it keeps the dashboard fully self-contained.
 */

export interface GeoPoint {
  lat: number;
  lon: number;
}

export interface Bounds {
  minLat: number;
  maxLat: number;
  minLon: number;
  maxLon: number;
}

export function computeBounds(points: readonly GeoPoint[]): Bounds | null {
  if (points.length === 0) {
    return null;
  }
  let minLat = Infinity;
  let maxLat = -Infinity;
  let minLon = Infinity;
  let maxLon = -Infinity;
  for (const { lat, lon } of points) {
    if (lat < minLat) minLat = lat;
    if (lat > maxLat) maxLat = lat;
    if (lon < minLon) minLon = lon;
    if (lon > maxLon) maxLon = lon;
  }
  return { minLat, maxLat, minLon, maxLon };
}

/** Map a geotag into a width×height viewport with a symmetric margin.
 *  North is up: larger latitudes get smaller y. A degenerate axis (all
 *  points share the value) centers on that axis. The center of the bounds
 *  always lands on the center of the viewport. */
export function project(
  point: GeoPoint,
  bounds: Bounds,
  width: number,
  height: number,
  margin = 0.1,
): { x: number; y: number } {
  const innerW = width * (1 - 2 * margin);
  const innerH = height * (1 - 2 * margin);
  const lonSpan = bounds.maxLon - bounds.minLon;
  const latSpan = bounds.maxLat - bounds.minLat;
  const fx = lonSpan === 0 ? 0.5 : (point.lon - bounds.minLon) / lonSpan;
  const fy = latSpan === 0 ? 0.5 : (point.lat - bounds.minLat) / latSpan;
  return {
    x: width * margin + fx * innerW,
    y: height * margin + (1 - fy) * innerH,
  };
}
