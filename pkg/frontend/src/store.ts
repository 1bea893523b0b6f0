import type {
  ServerEventWire,
  VictimSnapshot,
  VictimStatus,
} from "./types.js";

export type ConnectionState = "connecting" | "live" | "disconnected";

export interface Notice {
  kind: "conflict" | "gone" | "error";
  victimId: string;
  message: string;
}

const NEXT_STATUS: Partial<Record<VictimStatus, VictimStatus>> = {
  Reported: "Acknowledged",
  Acknowledged: "Treated",
};

/** The only transition a row offers: Reported → Acknowledged → Treated. */
export function nextStatus(status: VictimStatus): VictimStatus | null {
  return NEXT_STATUS[status] ?? null;
}

/** Order two snapshots of the same victim by freshness. The server replaces
 *  a victim's report only with a (timestamp, report id)-newer one and appends
 *  to history on every status transition, so the triple (report timestamp,
 *  report id, history length) is strictly monotone over a victim's lifetime.
 *  It lets replayed events (which carry snapshots taken at emission time)
 *  apply idempotently without ever regressing a row that the initial table
 *  fetch already showed in a newer state. */
export function compareFreshness(a: VictimSnapshot, b: VictimSnapshot): number {
  if (a.report.timestamp_ms !== b.report.timestamp_ms) {
    return a.report.timestamp_ms - b.report.timestamp_ms;
  }
  if (a.report.report_id !== b.report.report_id) {
    return a.report.report_id < b.report.report_id ? -1 : 1;
  }
  return a.history.length - b.history.length;
}

function compareRows(a: VictimSnapshot, b: VictimSnapshot): number {
  // Mirror of the server's board order: most severe first, then earliest
  // report, then victim id.
  if (a.report.acuity !== b.report.acuity) {
    return a.report.acuity - b.report.acuity;
  }
  if (a.report.timestamp_ms !== b.report.timestamp_ms) {
    return a.report.timestamp_ms - b.report.timestamp_ms;
  }
  return a.victim_id < b.victim_id ? -1 : a.victim_id > b.victim_id ? 1 : 0;
}

/** Client-side mirror of the command server's victim board.
 *
 *  Events are applied at most once (the event-id cursor never decreases) and
 *  never backwards (snapshot freshness keys), so a reconnect that replays
 *  already-seen events is harmless. Status changes are optimistic: the row
 *  flips immediately, and a rejection rolls it back and records a notice —
 *  unless an authoritative event arrived in the meantime, in which case the
 *  event wins and only the notice remains. At most one status mutation per
 *  victim may be in flight.
 */
export class DashboardStore {
  private entries = new Map<string, VictimSnapshot>();
  private inFlight = new Map<string, VictimSnapshot>(); // victim id -> pre-mutation row
  readonly notices: Notice[] = [];
  lastEventId = 0;
  connection: ConnectionState = "connecting";
  selectedVictimId: string | null = null;

  /** Wholesale replacement from GET /api/victims (initial load or refresh). */
  reset(entries: VictimSnapshot[]): void {
    this.entries.clear();
    this.inFlight.clear();
    for (const entry of entries) {
      this.entries.set(entry.victim_id, entry);
    }
    if (this.selectedVictimId !== null && !this.entries.has(this.selectedVictimId)) {
      this.selectedVictimId = null;
    }
  }

  /** Apply one stream event. Returns false for a replay duplicate (event id
   *  already seen); true otherwise, whether or not the row content moved. */
  applyEvent(event: ServerEventWire): boolean {
    if (event.event_id <= this.lastEventId) {
      return false;
    }
    this.lastEventId = event.event_id;
    const incoming = event.victim;
    const current = this.entries.get(incoming.victim_id);
    if (current !== undefined && compareFreshness(incoming, current) < 0) {
      return true; // stale replay: the table is already newer
    }
    this.entries.set(incoming.victim_id, incoming);
    // The server has spoken for this row; a pending optimistic mutation must
    // not roll back over it.
    this.inFlight.delete(incoming.victim_id);
    return true;
  }

  /** Start an optimistic status transition. Returns the status being
   *  requested, or null when the row is missing, already terminal, or has a
   *  mutation in flight. */
  beginStatus(victimId: string): VictimStatus | null {
    const entry = this.entries.get(victimId);
    if (entry === undefined || this.inFlight.has(victimId)) {
      return null;
    }
    const next = nextStatus(entry.status);
    if (next === null) {
      return null;
    }
    this.inFlight.set(victimId, entry);
    this.entries.set(victimId, { ...entry, status: next });
    return next;
  }

  /** Land the server's response to our own mutation. Ignored if an event
   *  already superseded it (the event carried the same or newer state). */
  confirmStatus(victimId: string, authoritative: VictimSnapshot): void {
    if (!this.inFlight.delete(victimId)) {
      return;
    }
    const current = this.entries.get(victimId);
    if (current !== undefined && compareFreshness(authoritative, current) < 0) {
      return;
    }
    this.entries.set(victimId, authoritative);
  }

  /** Undo an optimistic transition the server rejected and record a visible
   *  notice. A 404 removes the row; a 409 restores it (someone else got
   *  there first — their event will carry the winning state). */
  rollbackStatus(victimId: string, failure: { status?: number; message: string }): void {
    const before = this.inFlight.get(victimId);
    this.inFlight.delete(victimId);
    if (failure.status === 404) {
      if (before !== undefined) {
        this.entries.delete(victimId);
        if (this.selectedVictimId === victimId) {
          this.selectedVictimId = null;
        }
      }
      this.notices.push({ kind: "gone", victimId, message: failure.message });
      return;
    }
    if (before !== undefined) {
      this.entries.set(victimId, before);
    }
    this.notices.push({
      kind: failure.status === 409 ? "conflict" : "error",
      victimId,
      message: failure.message,
    });
  }

  hasInFlight(victimId: string): boolean {
    return this.inFlight.has(victimId);
  }

  get(victimId: string): VictimSnapshot | undefined {
    return this.entries.get(victimId);
  }

  /** All rows in the server's board order. */
  ordered(): VictimSnapshot[] {
    return [...this.entries.values()].sort(compareRows);
  }

  /** Rows still needing attention, board order. */
  activeRows(): VictimSnapshot[] {
    return this.ordered().filter((entry) => entry.status !== "Treated");
  }

  /** Rows already treated, board order. */
  treatedRows(): VictimSnapshot[] {
    return this.ordered().filter((entry) => entry.status === "Treated");
  }

  select(victimId: string | null): void {
    this.selectedVictimId =
      victimId !== null && this.entries.has(victimId) ? victimId : null;
  }

  setConnection(state: ConnectionState): void {
    this.connection = state;
  }
}
