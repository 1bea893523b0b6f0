/** Wire types for the command server's HTTP + SSE API. Field names match the
 *  server's JSON exactly; nothing here is renamed or reshaped. */

export type VictimStatus = "Reported" | "Acknowledged" | "Treated";

export interface VitalReadings {
  temperature: number | null;
  heart_rate: number | null;
  resp_rate: number | null;
  o2_sat: number | null;
  sbp: number | null;
  dbp: number | null;
  pain: number | null;
}

export interface VictimReportWire {
  report_id: string;
  victim_id: string;
  robot_id: string;
  lat: number;
  lon: number;
  vitals: VitalReadings;
  /** 1 is most severe, 5 least. */
  acuity: number;
  probabilities: number[];
  timestamp_ms: number;
  sensor_fault: boolean;
}

export interface HistoryEntry {
  status: VictimStatus;
  timestamp_ms: number;
  actor: string;
}

/** One row of the victim board as the server serializes it. */
export interface VictimSnapshot {
  victim_id: string;
  status: VictimStatus;
  responder_id: string | null;
  report: VictimReportWire;
  history: HistoryEntry[];
}

export type EventKind = "ReportAdded" | "StatusChanged";

export interface ServerEventWire {
  event_id: number;
  kind: EventKind;
  victim: VictimSnapshot;
}
