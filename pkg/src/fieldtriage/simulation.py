"""Discrete-time triage-robot simulation.

Robots cycle Scanning → Approaching → Measuring → Reporting per victim. A
scanning robot that claims a victim starts approaching within the same step;
measuring and reporting each take one full step. All randomness (sensor
noise) derives from the scenario seed per (robot, victim, attempt), and
time is a simulated clock, so a rerun produces a bit-identical mission log.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

import numpy as np

from .ensemble import EnsembleModel
from .errors import OutOfRangeError
from .inference import make_classifier
from .mlp import MlpModel, TriageLabel
from .tree import DecisionTree
from .records import VITAL_FIELDS, VitalSigns, clamp_to_bounds
from .reporting import VictimReport, report_to_dict
from .scenario import Scenario, planar_distance_m
from .seeds import derive_seed

ARRIVAL_RADIUS_M = 0.5

MODE_SCANNING = "scanning"
MODE_APPROACHING = "approaching"
MODE_MEASURING = "measuring"
MODE_REPORTING = "reporting"

FAULT_LABEL = TriageLabel(acuity=1, probabilities=(1.0, 0.0, 0.0, 0.0, 0.0))


@dataclass
class RobotState:
    robot_id: str
    lat: float
    lon: float
    speed_mps: float
    detection_radius_m: float
    mode: str = MODE_SCANNING
    target_victim_id: str | None = None
    visited: set[str] = field(default_factory=set)
    # staged measurement awaiting the reporting step: (vitals, label, fault)
    pending: tuple[VitalSigns, TriageLabel, bool] | None = None


@dataclass
class WorldState:
    scenario: Scenario
    classifier: "object"          # VitalSigns -> TriageLabel, raises OutOfRange on fault
    robots: list[RobotState]
    reported: set[str] = field(default_factory=set)
    claims: dict[str, str] = field(default_factory=dict)  # victim id -> robot id
    clock_ms: int = 0


def init_world(scenario: Scenario, classifier) -> WorldState:
    if isinstance(classifier, (MlpModel, DecisionTree, EnsembleModel)):
        classifier = make_classifier(classifier)
    robots = [RobotState(robot_id=r.robot_id, lat=r.lat, lon=r.lon,
                         speed_mps=r.speed_mps, detection_radius_m=r.detection_radius_m)
              for r in sorted(scenario.robots, key=lambda r: r.robot_id)]
    return WorldState(scenario=scenario, classifier=classifier, robots=robots,
                      clock_ms=scenario.start_time_ms)


def detect(robot: RobotState, world: WorldState) -> list[str]:
    """Victim ids in radius that are unvisited, unreported, and unclaimed,
    nearest first (victim id is the deterministic tie-break)."""
    found = []
    for victim in world.scenario.victims:
        if (victim.victim_id in robot.visited
                or victim.victim_id in world.reported
                or victim.victim_id in world.claims):
            continue
        distance = planar_distance_m(robot.lat, robot.lon, victim.lat, victim.lon)
        if distance <= robot.detection_radius_m:
            found.append((distance, victim.victim_id))
    found.sort()
    return [victim_id for _, victim_id in found]


def sense_vitals(truth: VitalSigns, sigmas: dict, seed: int) -> VitalSigns:
    """One noisy contact-sensor reading: Gaussian per vital, then clamped."""
    rng = np.random.default_rng(seed)
    noise = rng.standard_normal(len(VITAL_FIELDS))
    measured = {
        name: truth.get(name) + noise[i] * float(sigmas.get(name, 0.0))
        for i, name in enumerate(VITAL_FIELDS)
    }
    return clamp_to_bounds(VitalSigns(**measured, pain=truth.pain))


def _move_toward(robot: RobotState, lat: float, lon: float, dt: float) -> None:
    distance = planar_distance_m(robot.lat, robot.lon, lat, lon)
    reach = robot.speed_mps * dt
    if reach >= distance:
        robot.lat, robot.lon = lat, lon
    else:
        fraction = reach / distance
        robot.lat += (lat - robot.lat) * fraction
        robot.lon += (lon - robot.lon) * fraction


def _measure(world: WorldState, robot: RobotState) -> tuple[VitalSigns, TriageLabel, bool]:
    """Take a reading and classify; one retry on sensor fault, then escalate.

    A double fault is reported as the most severe acuity with a fault flag —
    a responder must look rather than trust a broken sensor.
    """
    victim = world.scenario.victim(robot.target_victim_id)
    sensed = None
    for attempt in (1, 2):
        seed = derive_seed(world.scenario.seed, "sense", robot.robot_id,
                           victim.victim_id, attempt)
        sensed = sense_vitals(victim.vitals, world.scenario.sensor_sigmas, seed)
        try:
            return sensed, world.classifier(sensed), False
        except OutOfRangeError:
            continue
    return sensed, FAULT_LABEL, True


def simulate_step(world: WorldState, dt: float) -> tuple[WorldState, list[VictimReport]]:
    """Advance every robot by dt seconds; robots act in ascending id order,
    which also settles competing claims in favor of the lowest id."""
    if dt == 0:
        return world, []
    world.clock_ms += int(round(dt * 1000.0))
    reports: list[VictimReport] = []
    for robot in world.robots:
        if robot.mode == MODE_SCANNING:
            candidates = detect(robot, world)
            if candidates:
                robot.target_victim_id = candidates[0]
                world.claims[candidates[0]] = robot.robot_id
                robot.mode = MODE_APPROACHING
                # fall through: the approach leg starts this same step
        if robot.mode == MODE_APPROACHING:
            victim = world.scenario.victim(robot.target_victim_id)
            _move_toward(robot, victim.lat, victim.lon, dt)
            if planar_distance_m(robot.lat, robot.lon, victim.lat, victim.lon) <= ARRIVAL_RADIUS_M:
                robot.mode = MODE_MEASURING
        elif robot.mode == MODE_MEASURING:
            robot.pending = _measure(world, robot)
            robot.mode = MODE_REPORTING
        elif robot.mode == MODE_REPORTING:
            victim = world.scenario.victim(robot.target_victim_id)
            vitals, label, fault = robot.pending
            reports.append(VictimReport(
                report_id=f"{robot.robot_id}-{victim.victim_id}",
                victim_id=victim.victim_id,
                robot_id=robot.robot_id,
                lat=victim.lat,
                lon=victim.lon,
                vitals=vitals,
                acuity=label.acuity,
                probabilities=label.probabilities,
                timestamp_ms=world.clock_ms,
                sensor_fault=fault,
            ))
            robot.visited.add(victim.victim_id)
            world.reported.add(victim.victim_id)
            world.claims.pop(victim.victim_id, None)
            robot.pending = None
            robot.target_victim_id = None
            robot.mode = MODE_SCANNING
    return world, reports


class CollectorSink:
    """In-process sink: keeps delivered reports in order."""

    def __init__(self):
        self.reports: list[VictimReport] = []

    def deliver(self, report: VictimReport) -> None:
        self.reports.append(report)


class HttpSink:
    """Delivers reports to a command server's report endpoint."""

    def __init__(self, base_url: str, timeout_s: float = 5.0):
        import requests

        self._requests = requests
        self.base_url = base_url.rstrip("/")
        self.timeout_s = timeout_s

    def deliver(self, report: VictimReport) -> None:
        response = self._requests.post(f"{self.base_url}/api/reports",
                                       json=report_to_dict(report),
                                       timeout=self.timeout_s)
        response.raise_for_status()


@dataclass(frozen=True)
class MissionLog:
    reports: tuple[VictimReport, ...]
    undelivered: tuple[str, ...]   # report ids that exhausted their retries
    steps: int


def _deliver_with_retry(sink, report: VictimReport, base_ms: float,
                        factor: float, attempts: int) -> bool:
    for attempt in range(1, attempts + 1):
        try:
            sink.deliver(report)
            return True
        except Exception:
            if attempt < attempts:
                time.sleep(base_ms * factor ** (attempt - 1) / 1000.0)
    return False


def run_mission(scenario: Scenario, model, sink=None, step_dt: float = 1.0,
                max_steps: int = 10000, retry_base_ms: float = 100.0,
                retry_factor: float = 2.0, retry_attempts: int = 5) -> MissionLog:
    """Run until every victim is reported (or max_steps), delivering each
    report to the sink in emission order."""
    sink = sink if sink is not None else CollectorSink()
    world = init_world(scenario, model)
    reports: list[VictimReport] = []
    undelivered: list[str] = []
    steps = 0
    while steps < max_steps and len(world.reported) < len(scenario.victims):
        world, emitted = simulate_step(world, step_dt)
        steps += 1
        for report in emitted:
            reports.append(report)
            if not _deliver_with_retry(sink, report, retry_base_ms,
                                       retry_factor, retry_attempts):
                undelivered.append(report.report_id)
    return MissionLog(reports=tuple(reports), undelivered=tuple(undelivered),
                      steps=steps)


def mission_log_lines(log: MissionLog) -> list[str]:
    """JSON-lines serialization, one report per line, stable key order."""
    lines = []
    for report in log.reports:
        entry = report_to_dict(report)
        if report.report_id in log.undelivered:
            entry["delivered"] = False
        lines.append(json.dumps(entry, sort_keys=True))
    return lines


def write_mission_log(path: str, log: MissionLog) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for line in mission_log_lines(log):
            fh.write(line + "\n")
