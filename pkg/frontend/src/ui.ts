import type { VictimSnapshot, VitalReadings } from "./types.js";
import type { DashboardStore, Notice } from "./store.js";
import { nextStatus } from "./store.js";
import { computeBounds, project } from "./map.js";

export interface UiHandlers {
  onAction: (victimId: string) => void;
  onSelect: (victimId: string) => void;
}

const ACTION_LABEL: Record<string, string> = {
  Acknowledged: "Acknowledge",
  Treated: "Mark treated",
};

const MAP_WIDTH = 420;
const MAP_HEIGHT = 320;
const SVG_NS = "http://www.w3.org/2000/svg";

function el(
  tag: string,
  attrs: Record<string, string> = {},
  children: (Node | string)[] = [],
): HTMLElement {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  node.append(...children);
  return node;
}

function formatValue(value: number | null, digits = 0): string {
  return value === null ? "–" : value.toFixed(digits);
}

function vitalsSummary(vitals: VitalReadings): string {
  const bp =
    vitals.sbp === null && vitals.dbp === null
      ? "–"
      : `${formatValue(vitals.sbp)}/${formatValue(vitals.dbp)}`;
  return [
    `T ${formatValue(vitals.temperature, 1)}`,
    `HR ${formatValue(vitals.heart_rate)}`,
    `RR ${formatValue(vitals.resp_rate)}`,
    `O2 ${formatValue(vitals.o2_sat)}%`,
    `BP ${bp}`,
    `pain ${formatValue(vitals.pain)}`,
  ].join(" · ");
}

function formatTime(timestampMs: number): string {
  return new Date(timestampMs).toLocaleTimeString();
}

function victimRow(
  entry: VictimSnapshot,
  store: DashboardStore,
  handlers: UiHandlers,
): HTMLElement {
  const report = entry.report;
  const badge = el(
    "span",
    { class: `badge acuity-${report.acuity}`, title: "acuity (1 = most severe)" },
    [String(report.acuity)],
  );
  const cells: HTMLElement[] = [
    el("td", {}, [badge]),
    el("td", { class: "victim-id" }, [
      entry.victim_id,
      ...(report.sensor_fault
        ? [el("span", { class: "fault", title: "reported after a sensor fault" }, ["⚠"])]
        : []),
    ]),
    el("td", { class: "vitals" }, [vitalsSummary(report.vitals)]),
    el("td", { class: "location" }, [
      `${report.lat.toFixed(5)}, ${report.lon.toFixed(5)}`,
    ]),
    el("td", { class: `status status-${entry.status.toLowerCase()}` }, [
      entry.status,
      ...(entry.responder_id ? [el("small", {}, [` by ${entry.responder_id}`])] : []),
    ]),
  ];

  const actionCell = el("td", { class: "action" });
  const next = nextStatus(entry.status);
  if (next !== null) {
    const button = el("button", { type: "button" }, [
      ACTION_LABEL[next] ?? next,
    ]) as HTMLButtonElement;
    button.disabled = store.hasInFlight(entry.victim_id);
    button.addEventListener("click", (click) => {
      click.stopPropagation();
      handlers.onAction(entry.victim_id);
    });
    actionCell.append(button);
  }
  cells.push(actionCell);

  const row = el("tr", { "data-victim": entry.victim_id }, cells);
  if (store.selectedVictimId === entry.victim_id) {
    row.classList.add("selected");
  }
  row.addEventListener("click", () => handlers.onSelect(entry.victim_id));
  return row;
}

function victimTable(
  title: string,
  rows: VictimSnapshot[],
  store: DashboardStore,
  handlers: UiHandlers,
): HTMLElement {
  const body = el("tbody");
  if (rows.length === 0) {
    body.append(
      el("tr", { class: "empty" }, [el("td", { colspan: "6" }, ["none"])]),
    );
  } else {
    for (const entry of rows) {
      body.append(victimRow(entry, store, handlers));
    }
  }
  return el("section", { class: "board-section" }, [
    el("h2", {}, [`${title} (${rows.length})`]),
    el("table", { class: "victims" }, [
      el("thead", {}, [
        el("tr", {}, [
          el("th", {}, ["acuity"]),
          el("th", {}, ["victim"]),
          el("th", {}, ["vitals"]),
          el("th", {}, ["location"]),
          el("th", {}, ["status"]),
          el("th", {}, [""]),
        ]),
      ]),
      body,
    ]),
  ]);
}

function mapPanel(store: DashboardStore, handlers: UiHandlers): HTMLElement {
  const entries = store.ordered();
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("class", "field-map");
  svg.setAttribute("viewBox", `0 0 ${MAP_WIDTH} ${MAP_HEIGHT}`);
  svg.setAttribute("role", "img");
  const bounds = computeBounds(entries.map((e) => e.report));
  if (bounds !== null) {
    for (const entry of entries) {
      const { x, y } = project(entry.report, bounds, MAP_WIDTH, MAP_HEIGHT);
      const marker = document.createElementNS(SVG_NS, "circle");
      marker.setAttribute("cx", String(x));
      marker.setAttribute("cy", String(y));
      marker.setAttribute("r", entry.victim_id === store.selectedVictimId ? "9" : "6");
      marker.setAttribute(
        "class",
        `marker acuity-${entry.report.acuity}` +
          (entry.status === "Treated" ? " treated" : ""),
      );
      const label = document.createElementNS(SVG_NS, "title");
      label.textContent = `${entry.victim_id} — acuity ${entry.report.acuity}, ${entry.status}`;
      marker.append(label);
      marker.addEventListener("click", () => handlers.onSelect(entry.victim_id));
      svg.append(marker);
    }
  }
  return el("section", { class: "map-panel" }, [
    el("h2", {}, ["field map"]),
    svg,
    ...(entries.length === 0 ? [el("p", { class: "muted" }, ["no geotags yet"])] : []),
  ]);
}

function detailPanel(store: DashboardStore): HTMLElement {
  const panel = el("section", { class: "detail-panel" });
  const selected =
    store.selectedVictimId !== null ? store.get(store.selectedVictimId) : undefined;
  if (selected === undefined) {
    panel.append(el("p", { class: "muted" }, ["select a victim for details"]));
    return panel;
  }
  const report = selected.report;
  panel.append(
    el("h2", {}, [selected.victim_id]),
    el("p", {}, [
      `reported by ${report.robot_id} at ${formatTime(report.timestamp_ms)} `,
      el("span", { class: `badge acuity-${report.acuity}` }, [
        `acuity ${report.acuity}`,
      ]),
    ]),
    el("p", { class: "vitals" }, [vitalsSummary(report.vitals)]),
    el("h3", {}, ["history"]),
    el(
      "ol",
      { class: "history" },
      selected.history.map((item) =>
        el("li", {}, [`${item.status} — ${formatTime(item.timestamp_ms)} — ${item.actor}`]),
      ),
    ),
  );
  return panel;
}

function noticeText(notice: Notice): string {
  switch (notice.kind) {
    case "conflict":
      return `${notice.victimId}: already handled — ${notice.message}`;
    case "gone":
      return `${notice.victimId}: no longer on the board — ${notice.message}`;
    default:
      return `${notice.victimId}: update failed — ${notice.message}`;
  }
}

function toasts(store: DashboardStore): HTMLElement {
  const recent = store.notices.slice(-4).reverse();
  return el(
    "div",
    { class: "toasts" },
    recent.map((notice) =>
      el("div", { class: `toast toast-${notice.kind}`, role: "alert" }, [
        noticeText(notice),
      ]),
    ),
  );
}

const CONNECTION_TEXT = {
  connecting: "connecting…",
  live: "live",
  disconnected: "disconnected — retrying",
} as const;

/** Rebuild the view from the store. All data flows through the store, so a
 *  redraw never refetches anything; it is a pure function of client state. */
export function render(
  root: HTMLElement,
  store: DashboardStore,
  handlers: UiHandlers,
): void {
  root.replaceChildren(
    el("header", {}, [
      el("h1", {}, ["field triage board"]),
      el("span", { class: `connection connection-${store.connection}` }, [
        CONNECTION_TEXT[store.connection],
      ]),
    ]),
    ...(store.connection === "disconnected"
      ? [el("div", { class: "banner", role: "status" }, [
          "connection to the command server lost — retrying",
        ])]
      : []),
    el("main", {}, [
      el("div", { class: "board" }, [
        victimTable("awaiting response", store.activeRows(), store, handlers),
        victimTable("treated", store.treatedRows(), store, handlers),
      ]),
      el("aside", {}, [mapPanel(store, handlers), detailPanel(store), toasts(store)]),
    ]),
  );
}
