"""The victim report: the wire record a robot sends to the command server."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DataError
from .records import ACUITY_LEVELS, VITAL_FIELDS, VitalSigns

PROBABILITY_TOLERANCE = 1e-6

_WIRE_VITALS = VITAL_FIELDS + ("pain",)


@dataclass(frozen=True)
class VictimReport:
    report_id: str
    victim_id: str
    robot_id: str
    lat: float
    lon: float
    vitals: VitalSigns
    acuity: int
    probabilities: tuple[float, ...]
    timestamp_ms: int
    sensor_fault: bool = False


def report_to_dict(report: VictimReport) -> dict:
    return {
        "report_id": report.report_id,
        "victim_id": report.victim_id,
        "robot_id": report.robot_id,
        "lat": report.lat,
        "lon": report.lon,
        "vitals": {f: report.vitals.get(f) for f in _WIRE_VITALS},
        "acuity": report.acuity,
        "probabilities": list(report.probabilities),
        "timestamp_ms": report.timestamp_ms,
        "sensor_fault": report.sensor_fault,
    }


def validate_report_dict(data) -> list[str]:
    """Names of fields that fail the wire contract; empty means valid."""
    if not isinstance(data, dict):
        return ["report"]
    failed = []
    for key in ("report_id", "victim_id", "robot_id"):
        value = data.get(key)
        if not isinstance(value, str) or not value:
            failed.append(key)
    for key in ("lat", "lon"):
        if not isinstance(data.get(key), (int, float)) or isinstance(data.get(key), bool):
            failed.append(key)
    vitals = data.get("vitals")
    if not isinstance(vitals, dict):
        failed.append("vitals")
    else:
        for name in VITAL_FIELDS:
            value = vitals.get(name)
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                failed.append(f"vitals.{name}")
    acuity = data.get("acuity")
    if not isinstance(acuity, int) or acuity not in ACUITY_LEVELS:
        failed.append("acuity")
    probabilities = data.get("probabilities")
    if (not isinstance(probabilities, list)
            or len(probabilities) != len(ACUITY_LEVELS)
            or any(not isinstance(p, (int, float)) or isinstance(p, bool) or p < 0
                   for p in probabilities)
            or abs(sum(probabilities) - 1.0) > PROBABILITY_TOLERANCE):
        failed.append("probabilities")
    timestamp = data.get("timestamp_ms")
    if not isinstance(timestamp, int) or isinstance(timestamp, bool) or timestamp < 0:
        failed.append("timestamp_ms")
    if not isinstance(data.get("sensor_fault", False), bool):
        failed.append("sensor_fault")
    return failed


def report_from_dict(data: dict) -> VictimReport:
    failed = validate_report_dict(data)
    if failed:
        raise DataError(f"invalid victim report, bad fields: {', '.join(failed)}")
    vitals_raw = data["vitals"]
    vitals = VitalSigns(
        **{f: (None if vitals_raw.get(f) is None else float(vitals_raw[f]))
           for f in VITAL_FIELDS},
        pain=(int(vitals_raw["pain"])
              if isinstance(vitals_raw.get("pain"), int)
              and not isinstance(vitals_raw.get("pain"), bool) else None),
    )
    return VictimReport(
        report_id=data["report_id"],
        victim_id=data["victim_id"],
        robot_id=data["robot_id"],
        lat=float(data["lat"]),
        lon=float(data["lon"]),
        vitals=vitals,
        acuity=int(data["acuity"]),
        probabilities=tuple(float(p) for p in data["probabilities"]),
        timestamp_ms=int(data["timestamp_ms"]),
        sensor_fault=bool(data.get("sensor_fault", False)),
    )
