"""Mission scenarios: a bounded field, downed victims, and triage robots."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .errors import DataError
from .records import VITAL_FIELDS, VitalSigns, bound_violations

METERS_PER_DEGREE = 111320.0

# Contact-sensor noise (1 sigma) for the vitals the robot actually measures;
# anything not listed is read exactly.
DEFAULT_SENSOR_SIGMAS = {"temperature": 0.4, "heart_rate": 3.0, "o2_sat": 1.5}


def planar_distance_m(lat1: float, lon1: float, lat2: float, lon2: float) -> float:
    """Planar small-field approximation; fine for sub-kilometer scenes."""
    dy = (lat2 - lat1) * METERS_PER_DEGREE
    dx = (lon2 - lon1) * METERS_PER_DEGREE * math.cos(math.radians((lat1 + lat2) / 2.0))
    return math.hypot(dx, dy)


@dataclass(frozen=True)
class FieldBounds:
    min_lat: float
    min_lon: float
    max_lat: float
    max_lon: float

    def contains(self, lat: float, lon: float) -> bool:
        return self.min_lat <= lat <= self.max_lat and self.min_lon <= lon <= self.max_lon


@dataclass(frozen=True)
class Victim:
    victim_id: str
    lat: float
    lon: float
    vitals: VitalSigns


@dataclass(frozen=True)
class RobotSpec:
    robot_id: str
    lat: float
    lon: float
    speed_mps: float
    detection_radius_m: float


@dataclass(frozen=True)
class Scenario:
    bounds: FieldBounds
    victims: tuple[Victim, ...]
    robots: tuple[RobotSpec, ...]
    sensor_sigmas: dict = field(default_factory=lambda: dict(DEFAULT_SENSOR_SIGMAS))
    seed: int = 0
    start_time_ms: int = 0

    def victim(self, victim_id: str) -> Victim:
        for v in self.victims:
            if v.victim_id == victim_id:
                return v
        raise DataError(f"unknown victim id {victim_id!r}")


def _validate(scenario: Scenario) -> Scenario:
    seen: set[str] = set()
    for i, victim in enumerate(scenario.victims):
        where = f"victims[{i}]"
        if victim.victim_id in seen:
            raise DataError(f"{where}: duplicate victim id {victim.victim_id!r}")
        seen.add(victim.victim_id)
        if not scenario.bounds.contains(victim.lat, victim.lon):
            raise DataError(f"{where}: position ({victim.lat}, {victim.lon}) outside field bounds")
        if not victim.vitals.complete():
            raise DataError(f"{where}: ground-truth vitals incomplete")
        bad = bound_violations(victim.vitals)
        if bad:
            raise DataError(f"{where}: ground-truth vitals implausible: {', '.join(bad)}")
    seen = set()
    for i, robot in enumerate(scenario.robots):
        where = f"robots[{i}]"
        if robot.robot_id in seen:
            raise DataError(f"{where}: duplicate robot id {robot.robot_id!r}")
        seen.add(robot.robot_id)
        if not scenario.bounds.contains(robot.lat, robot.lon):
            raise DataError(f"{where}: position ({robot.lat}, {robot.lon}) outside field bounds")
        if robot.speed_mps <= 0:
            raise DataError(f"{where}: speed must be positive, got {robot.speed_mps}")
        if robot.detection_radius_m <= 0:
            raise DataError(f"{where}: detection radius must be positive, got {robot.detection_radius_m}")
    for name in scenario.sensor_sigmas:
        if name not in VITAL_FIELDS:
            raise DataError(f"sensor_sigmas: unknown vital {name!r}")
    return scenario


def scenario_from_dict(data: dict) -> Scenario:
    try:
        bounds = FieldBounds(
            min_lat=float(data["bounds"]["min_lat"]),
            min_lon=float(data["bounds"]["min_lon"]),
            max_lat=float(data["bounds"]["max_lat"]),
            max_lon=float(data["bounds"]["max_lon"]),
        )
        victims = tuple(
            Victim(victim_id=str(v["victim_id"]), lat=float(v["lat"]), lon=float(v["lon"]),
                   vitals=VitalSigns(**{f: v["vitals"].get(f) for f in VITAL_FIELDS + ("pain",)}))
            for v in data["victims"]
        )
        robots = tuple(
            RobotSpec(robot_id=str(r["robot_id"]), lat=float(r["lat"]), lon=float(r["lon"]),
                      speed_mps=float(r["speed_mps"]),
                      detection_radius_m=float(r["detection_radius_m"]))
            for r in data["robots"]
        )
        sigmas = {str(k): float(v) for k, v in
                  data.get("sensor_sigmas", DEFAULT_SENSOR_SIGMAS).items()}
        scenario = Scenario(bounds=bounds, victims=victims, robots=robots,
                            sensor_sigmas=sigmas, seed=int(data.get("seed", 0)),
                            start_time_ms=int(data.get("start_time_ms", 0)))
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"malformed scenario: {exc}") from exc
    return _validate(scenario)


def scenario_to_dict(scenario: Scenario) -> dict:
    return {
        "bounds": {
            "min_lat": scenario.bounds.min_lat, "min_lon": scenario.bounds.min_lon,
            "max_lat": scenario.bounds.max_lat, "max_lon": scenario.bounds.max_lon,
        },
        "victims": [
            {"victim_id": v.victim_id, "lat": v.lat, "lon": v.lon,
             "vitals": {f: v.vitals.get(f) for f in VITAL_FIELDS + ("pain",)}}
            for v in scenario.victims
        ],
        "robots": [
            {"robot_id": r.robot_id, "lat": r.lat, "lon": r.lon,
             "speed_mps": r.speed_mps, "detection_radius_m": r.detection_radius_m}
            for r in scenario.robots
        ],
        "sensor_sigmas": dict(scenario.sensor_sigmas),
        "seed": scenario.seed,
        "start_time_ms": scenario.start_time_ms,
    }


def load_scenario(path: str) -> Scenario:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except FileNotFoundError:
        raise DataError(f"scenario file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise DataError(f"scenario file is not valid JSON: {exc}") from exc
    return scenario_from_dict(data)


def save_scenario(path: str, scenario: Scenario) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(scenario_to_dict(scenario), fh, indent=2, sort_keys=True)
        fh.write("\n")
