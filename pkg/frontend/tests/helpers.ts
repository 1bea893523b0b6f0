import type {
  ServerEventWire,
  VictimSnapshot,
  VictimStatus,
} from "../src/types.js";

let reportCounter = 0;

export interface SnapshotOptions {
  victimId: string;
  acuity?: number;
  timestampMs?: number;
  status?: VictimStatus;
  responderId?: string | null;
  reportId?: string;
  lat?: number;
  lon?: number;
  historyLength?: number;
  sensorFault?: boolean;
}

/** A board row shaped exactly like the server's JSON. History is padded to
 *  the requested length the same way real transitions would grow it. */
export function makeSnapshot(options: SnapshotOptions): VictimSnapshot {
  const {
    victimId,
    acuity = 3,
    timestampMs = 1000,
    status = "Reported",
    responderId = null,
    reportId = options.reportId ?? `r1-${victimId}-${++reportCounter}`,
    lat = 40.0,
    lon = -105.0,
    historyLength,
  } = options;
  const statuses: VictimStatus[] = ["Reported", "Acknowledged", "Treated"];
  const depth = historyLength ?? statuses.indexOf(status) + 1;
  const history = Array.from({ length: depth }, (_, i) => ({
    status: statuses[Math.min(i, statuses.length - 1)] as VictimStatus,
    timestamp_ms: timestampMs + i,
    actor: i === 0 ? "r1" : (responderId ?? "medic-1"),
  }));
  return {
    victim_id: victimId,
    status,
    responder_id: responderId,
    report: {
      report_id: reportId,
      victim_id: victimId,
      robot_id: "r1",
      lat,
      lon,
      vitals: {
        temperature: 36.6,
        heart_rate: 88,
        resp_rate: 16,
        o2_sat: 97,
        sbp: 120,
        dbp: 80,
        pain: 2,
      },
      acuity,
      probabilities: [0.1, 0.1, 0.4, 0.2, 0.2],
      timestamp_ms: timestampMs,
      sensor_fault: options.sensorFault ?? false,
    },
    history,
  };
}

export function makeEvent(
  eventId: number,
  kind: ServerEventWire["kind"],
  victim: VictimSnapshot,
): ServerEventWire {
  return { event_id: eventId, kind, victim };
}
