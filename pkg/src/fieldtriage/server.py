"""Command-server core: victim registry, append-only event log, live feed.

Every accepted mutation becomes one JSON line in the log (flushed and
fsynced before it is visible), and the in-memory registry is a pure fold
over that log: recovery replays it and lands in the identical state. Event
ids are contiguous from 1, and subscribers receive events strictly in id
order — replayed first, then live.
"""

from __future__ import annotations

import json
import logging
import os
import threading
import time
from dataclasses import dataclass, field

from .errors import ConflictError, DataError, NotFoundError
from .reporting import (VictimReport, report_from_dict, report_to_dict,
                        validate_report_dict)

logger = logging.getLogger(__name__)

STATUS_REPORTED = "Reported"
STATUS_ACKNOWLEDGED = "Acknowledged"
STATUS_TREATED = "Treated"
STATUSES = (STATUS_REPORTED, STATUS_ACKNOWLEDGED, STATUS_TREATED)

# the only legal moves; anything else is a conflict
_NEXT_STATUS = {STATUS_REPORTED: STATUS_ACKNOWLEDGED,
                STATUS_ACKNOWLEDGED: STATUS_TREATED}

KIND_REPORT_ADDED = "ReportAdded"
KIND_STATUS_CHANGED = "StatusChanged"


@dataclass
class VictimEntry:
    victim_id: str
    report: VictimReport
    status: str = STATUS_REPORTED
    responder_id: str | None = None
    history: list[tuple[str, int, str]] = field(default_factory=list)  # (status, ms, actor)

    def as_dict(self) -> dict:
        return {
            "victim_id": self.victim_id,
            "status": self.status,
            "responder_id": self.responder_id,
            "report": report_to_dict(self.report),
            "history": [
                {"status": status, "timestamp_ms": ts, "actor": actor}
                for status, ts, actor in self.history
            ],
        }


@dataclass(frozen=True)
class ServerEvent:
    event_id: int
    kind: str
    victim: dict  # VictimEntry snapshot at emission time

    def as_dict(self) -> dict:
        return {"event_id": self.event_id, "kind": self.kind, "victim": self.victim}


class VictimRegistry:
    """Thread-safe registry; all mutations commit through one lock + log append."""

    def __init__(self, log_path: str | None = None):
        self._lock = threading.Lock()
        self._new_event = threading.Condition(self._lock)
        self._entries: dict[str, VictimEntry] = {}
        self._seen_reports: dict[str, str] = {}  # report id -> victim id
        self._events: list[ServerEvent] = []
        self._log_path = log_path
        self._log_file = None

    # --- commit plumbing -------------------------------------------------

    def _append_to_log(self, record: dict) -> None:
        if self._log_path is None:
            return
        if self._log_file is None:
            self._log_file = open(self._log_path, "a", encoding="utf-8")
        self._log_file.write(json.dumps(record, sort_keys=True) + "\n")
        self._log_file.flush()
        os.fsync(self._log_file.fileno())

    def _emit(self, kind: str, entry: VictimEntry) -> ServerEvent:
        event = ServerEvent(event_id=len(self._events) + 1, kind=kind,
                            victim=entry.as_dict())
        self._events.append(event)
        self._new_event.notify_all()
        return event

    # --- fold steps (shared by live mutation and recovery) ---------------

    def _apply_report(self, report: VictimReport) -> VictimEntry:
        self._seen_reports[report.report_id] = report.victim_id
        entry = self._entries.get(report.victim_id)
        if entry is None:
            entry = VictimEntry(victim_id=report.victim_id, report=report)
            entry.history.append((STATUS_REPORTED, report.timestamp_ms, report.robot_id))
            self._entries[report.victim_id] = entry
        elif ((report.timestamp_ms, report.report_id)
              >= (entry.report.timestamp_ms, entry.report.report_id)):
            entry.report = report  # newest report wins; status workflow untouched
        return entry

    def _apply_status(self, victim_id: str, status: str, responder_id: str,
                      timestamp_ms: int) -> VictimEntry:
        entry = self._entries[victim_id]
        entry.status = status
        entry.responder_id = responder_id
        entry.history.append((status, timestamp_ms, responder_id))
        return entry

    # --- public operations ------------------------------------------------

    def submit_report(self, report: VictimReport | dict) -> str:
        """Accept one report; idempotent on report id. Returns the victim id."""
        if isinstance(report, dict):
            report = report_from_dict(report)  # raises DataError listing fields
        elif isinstance(report, VictimReport):
            failed = validate_report_dict(report_to_dict(report))
            if failed:
                raise DataError(f"invalid victim report, bad fields: {', '.join(failed)}")
        else:
            raise DataError("victim report must be a JSON object")
        with self._lock:
            known = self._seen_reports.get(report.report_id)
            if known is not None:
                return known
            self._append_to_log({"event_id": len(self._events) + 1,
                                 "kind": KIND_REPORT_ADDED,
                                 "report": report_to_dict(report)})
            entry = self._apply_report(report)
            self._emit(KIND_REPORT_ADDED, entry)
            return entry.victim_id

    def update_status(self, victim_id: str, new_status: str,
                      responder_id: str) -> VictimEntry:
        if new_status not in STATUSES:
            raise DataError(f"unknown status {new_status!r}")
        with self._lock:
            entry = self._entries.get(victim_id)
            if entry is None:
                raise NotFoundError(f"unknown victim {victim_id!r}")
            if _NEXT_STATUS.get(entry.status) != new_status:
                raise ConflictError(
                    f"illegal transition {entry.status} -> {new_status} "
                    f"for victim {victim_id!r}")
            timestamp_ms = int(time.time() * 1000)
            self._append_to_log({"event_id": len(self._events) + 1,
                                 "kind": KIND_STATUS_CHANGED,
                                 "victim_id": victim_id,
                                 "status": new_status,
                                 "responder_id": responder_id,
                                 "timestamp_ms": timestamp_ms})
            entry = self._apply_status(victim_id, new_status, responder_id, timestamp_ms)
            self._emit(KIND_STATUS_CHANGED, entry)
            return entry

    def list_victims(self, status: str | None = None,
                     acuity: int | None = None) -> list[VictimEntry]:
        """Most severe first: acuity asc, then report timestamp asc, then id."""
        with self._lock:
            entries = list(self._entries.values())
        if status is not None:
            entries = [e for e in entries if e.status == status]
        if acuity is not None:
            entries = [e for e in entries if e.report.acuity == acuity]
        entries.sort(key=lambda e: (e.report.acuity, e.report.timestamp_ms, e.victim_id))
        return entries

    def get(self, victim_id: str) -> VictimEntry:
        with self._lock:
            entry = self._entries.get(victim_id)
        if entry is None:
            raise NotFoundError(f"unknown victim {victim_id!r}")
        return entry

    @property
    def last_event_id(self) -> int:
        with self._lock:
            return len(self._events)

    def events_since(self, since: int = 0, timeout_s: float | None = None):
        """Yield events with id > since in order: replay, then live.

        Blocks for new events; when timeout_s is set, yields None on each
        quiet interval so callers can emit keepalives. Never yields a gap.
        """
        next_id = max(0, since) + 1
        while True:
            with self._lock:
                while len(self._events) < next_id:
                    if not self._new_event.wait(timeout=timeout_s):
                        break
                batch = self._events[next_id - 1:]
            if not batch:
                yield None
                continue
            for event in batch:
                yield event
            next_id += len(batch)

    def close(self) -> None:
        with self._lock:
            if self._log_file is not None:
                self._log_file.close()
                self._log_file = None


def recover(log_path: str) -> VictimRegistry:
    """Rebuild a registry by folding the event log.

    A torn trailing line (crash mid-append) is discarded with a warning; any
    other malformed line or an event-id gap is ambiguous state and refuses
    to load.
    """
    registry = VictimRegistry(log_path=log_path)
    if not os.path.exists(log_path):
        return registry
    with open(log_path, encoding="utf-8") as fh:
        lines = fh.read().split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    for index, line in enumerate(lines):
        last = index == len(lines) - 1
        try:
            record = json.loads(line)
            event_id = record["event_id"]
            kind = record["kind"]
            if kind == KIND_REPORT_ADDED:
                args = (report_from_dict(record["report"]),)
            elif kind == KIND_STATUS_CHANGED:
                args = (record["victim_id"], record["status"],
                        record["responder_id"], int(record["timestamp_ms"]))
            else:
                raise DataError(f"unknown event kind {kind!r}")
        except (json.JSONDecodeError, KeyError, TypeError, ValueError, DataError) as exc:
            if last:
                logger.warning("discarding torn trailing log line %d: %s", index + 1, exc)
                break
            raise DataError(f"corrupt event log line {index + 1}: {exc}") from exc
        if event_id != len(registry._events) + 1:
            raise DataError(
                f"event log line {index + 1}: id {event_id} breaks the "
                f"contiguous sequence (expected {len(registry._events) + 1})")
        if kind == KIND_REPORT_ADDED:
            entry = registry._apply_report(*args)
        else:
            victim_id = args[0]
            if victim_id not in registry._entries:
                raise DataError(
                    f"event log line {index + 1}: status change for unknown "
                    f"victim {victim_id!r}")
            entry = registry._apply_status(*args)
        registry._events.append(ServerEvent(event_id=event_id, kind=kind,
                                            victim=entry.as_dict()))
    return registry
