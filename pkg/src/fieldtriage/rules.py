"""Config-driven acuity labeling rules.

A rule table is an ordered list of (acuity, conditions) clauses. A clause
matches when ANY of its conditions holds (pure OR). The first matching
clause assigns the label; records matching nothing get the default acuity.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import DataError, OutOfRangeError
from .records import ACUITY_LEVELS, VITAL_FIELDS, VitalSigns, bound_violations

_OPS = ("<", ">", "<=", ">=")

# Textbook resting vitals for an uninjured adult; acuity-4 thresholds are
# drawn at +/-10% around these.
NORMAL_VITALS = {
    "temperature": 98.6,
    "heart_rate": 75.0,
    "resp_rate": 16.0,
    "o2_sat": 98.0,
    "sbp": 120.0,
    "dbp": 80.0,
}


@dataclass(frozen=True)
class Condition:
    feature: str
    op: str          # one of < > <= >=
    threshold: float

    def matches(self, vitals: VitalSigns) -> bool:
        value = vitals.get(self.feature)
        if value is None:
            return False
        if self.op == "<":
            return value < self.threshold
        if self.op == ">":
            return value > self.threshold
        if self.op == "<=":
            return value <= self.threshold
        return value >= self.threshold


@dataclass(frozen=True)
class RuleClause:
    acuity: int
    conditions: tuple[Condition, ...]

    def matches(self, vitals: VitalSigns) -> bool:
        return any(c.matches(vitals) for c in self.conditions)


@dataclass(frozen=True)
class RuleTable:
    clauses: tuple[RuleClause, ...]
    default_acuity: int = 5

    def label(self, vitals: VitalSigns) -> int:
        for clause in self.clauses:
            if clause.matches(vitals):
                return clause.acuity
        return self.default_acuity


def _pct_band(feature: str, pct: float = 0.10) -> list[Condition]:
    center = NORMAL_VITALS[feature]
    return [
        Condition(feature, "<", center * (1 - pct)),
        Condition(feature, ">", center * (1 + pct)),
    ]


def default_rule_table() -> RuleTable:
    """Severity rules from most to least urgent; anything normal is acuity 5."""
    level4 = []
    for feature in VITAL_FIELDS:
        level4.extend(_pct_band(feature))
    return RuleTable(clauses=(
        RuleClause(1, (
            Condition("o2_sat", "<", 85.0),
            Condition("heart_rate", ">", 140.0),
            Condition("heart_rate", "<", 40.0),
            Condition("sbp", "<", 80.0),
        )),
        RuleClause(2, (
            Condition("o2_sat", "<", 90.0),
            Condition("heart_rate", ">", 120.0),
            Condition("temperature", ">", 103.0),
            Condition("sbp", "<", 90.0),
        )),
        RuleClause(3, (
            Condition("o2_sat", "<", 94.0),
            Condition("heart_rate", ">", 100.0),
            Condition("temperature", ">", 100.4),
            Condition("resp_rate", ">", 24.0),
        )),
        RuleClause(4, tuple(level4)),
    ), default_acuity=5)


def label_by_rule(vitals: VitalSigns, table: RuleTable | None = None) -> int:
    violations = bound_violations(vitals)
    if violations:
        raise OutOfRangeError(f"vitals out of plausible range: {', '.join(violations)}")
    table = table if table is not None else default_rule_table()
    return table.label(vitals)


def rule_table_to_dict(table: RuleTable) -> dict:
    return {
        "default_acuity": table.default_acuity,
        "clauses": [
            {
                "acuity": clause.acuity,
                "conditions": [
                    {"feature": c.feature, "op": c.op, "threshold": c.threshold}
                    for c in clause.conditions
                ],
            }
            for clause in table.clauses
        ],
    }


def rule_table_from_dict(data: dict) -> RuleTable:
    try:
        default_acuity = int(data.get("default_acuity", 5))
        if default_acuity not in ACUITY_LEVELS:
            raise DataError(f"default acuity out of range: {default_acuity}")
        clauses = []
        for raw_clause in data["clauses"]:
            acuity = int(raw_clause["acuity"])
            if acuity not in ACUITY_LEVELS:
                raise DataError(f"clause acuity out of range: {acuity}")
            conditions = []
            for raw in raw_clause["conditions"]:
                feature, op = raw["feature"], raw["op"]
                if feature not in VITAL_FIELDS:
                    raise DataError(f"unknown feature in rule: {feature!r}")
                if op not in _OPS:
                    raise DataError(f"unknown operator in rule: {op!r}")
                conditions.append(Condition(feature, op, float(raw["threshold"])))
            clauses.append(RuleClause(acuity, tuple(conditions)))
        return RuleTable(tuple(clauses), default_acuity)
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"malformed rule table: {exc}") from exc


def load_rule_table(path: str) -> RuleTable:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except FileNotFoundError:
        raise DataError(f"rule table file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise DataError(f"rule table is not valid JSON: {exc}") from exc
    return rule_table_from_dict(data)


def save_rule_table(path: str, table: RuleTable) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(rule_table_to_dict(table), fh, indent=2, sort_keys=True)
        fh.write("\n")
