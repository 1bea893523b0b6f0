/** Server base URL resolution.
 *
 *  Default is the empty string (same origin): the command server can host
 *  this bundle itself, so relative /api/... paths just work. A deployment
 *  that serves the bundle elsewhere sets a global before loading main.js:
 *
 *      <script>globalThis.FIELDTRIAGE_BASE_URL = "http://host:8000";</script>
 */
export function resolveBaseUrl(): string {
  const override = (globalThis as { FIELDTRIAGE_BASE_URL?: unknown })
    .FIELDTRIAGE_BASE_URL;
  if (typeof override === "string") {
    return override.replace(/\/+$/, "");
  }
  return "";
}
