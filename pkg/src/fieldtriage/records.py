"""Triage-table records: vitals schema, plausibility bounds, CSV I/O.

The on-disk format is delimiter-separated text with a header row naming the
columns temperature, heartrate, resprate, o2sat, sbp, dbp, pain, acuity,
chiefcomplaint (case-insensitive). In-memory records use snake_case field
names; vitals may be None until the cleaning pass drops incomplete rows.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass, replace

from .errors import DataError

ACUITY_LEVELS = (1, 2, 3, 4, 5)

# The six mandatory vitals, in canonical order. Pain is optional everywhere.
VITAL_FIELDS = ("temperature", "heart_rate", "resp_rate", "o2_sat", "sbp", "dbp")

MAIN_FEATURES = ("temperature", "heart_rate", "o2_sat")
FIVE_FEATURES = ("temperature", "heart_rate", "resp_rate", "o2_sat", "sbp")

# Plausibility bounds: values strictly outside are outliers, boundary values
# are kept. resp_rate has no bound; sbp/dbp are bounded above only.
VITAL_BOUNDS = {
    "temperature": (-130.0, 135.0),
    "heart_rate": (0.0, 220.0),
    "o2_sat": (0.0, 100.0),
    "sbp": (None, 190.0),
    "dbp": (None, 170.0),
}

# CSV header -> record field
_COLUMN_MAP = {
    "temperature": "temperature",
    "heartrate": "heart_rate",
    "resprate": "resp_rate",
    "o2sat": "o2_sat",
    "sbp": "sbp",
    "dbp": "dbp",
    "pain": "pain",
    "acuity": "acuity",
    "chiefcomplaint": "chief_complaint",
}
_FIELD_TO_COLUMN = {v: k for k, v in _COLUMN_MAP.items()}
CSV_COLUMNS = tuple(_COLUMN_MAP)

_MISSING_TOKENS = {"", "na", "n/a", "nan", "none", "null", "-"}


@dataclass(frozen=True)
class VitalSigns:
    temperature: float | None = None
    heart_rate: float | None = None
    resp_rate: float | None = None
    o2_sat: float | None = None
    sbp: float | None = None
    dbp: float | None = None
    pain: int | None = None

    def get(self, field: str) -> float | None:
        return getattr(self, field)

    def complete(self) -> bool:
        """True when all six mandatory vitals are present (pain may be absent)."""
        return all(getattr(self, f) is not None for f in VITAL_FIELDS)


@dataclass(frozen=True)
class TriageRecord:
    vitals: VitalSigns
    acuity: int | None = None
    chief_complaint: str | None = None

    def key(self):
        """Exact-equality key over all schema columns, for duplicate removal."""
        v = self.vitals
        return (v.temperature, v.heart_rate, v.resp_rate, v.o2_sat, v.sbp,
                v.dbp, v.pain, self.acuity, self.chief_complaint)


@dataclass(frozen=True)
class ParseDiagnostic:
    row: int        # 1-based data row (header excluded)
    column: str     # CSV column name
    value: str
    reason: str

    def __str__(self):
        return f"row {self.row}, column {self.column!r}: {self.reason} ({self.value!r})"


def bound_violations(vitals: VitalSigns) -> list[str]:
    """Names of vitals strictly outside their plausibility bounds."""
    bad = []
    for field, (lo, hi) in VITAL_BOUNDS.items():
        value = getattr(vitals, field)
        if value is None:
            continue
        if (lo is not None and value < lo) or (hi is not None and value > hi):
            bad.append(field)
    return bad


def in_bounds(vitals: VitalSigns) -> bool:
    return not bound_violations(vitals)


def clamp_to_bounds(vitals: VitalSigns) -> VitalSigns:
    """Clamp every bounded vital into its plausible range."""
    updates = {}
    for field, (lo, hi) in VITAL_BOUNDS.items():
        value = getattr(vitals, field)
        if value is None:
            continue
        if lo is not None and value < lo:
            updates[field] = lo
        elif hi is not None and value > hi:
            updates[field] = hi
    return replace(vitals, **updates) if updates else vitals


def _parse_float(raw: str) -> tuple[float | None, bool]:
    """Returns (value, ok). Blank/NA tokens parse to None with ok=True."""
    text = raw.strip()
    if text.lower() in _MISSING_TOKENS:
        return None, True
    try:
        return float(text), True
    except ValueError:
        return None, False


def _parse_pain(raw: str) -> int | None:
    # Pain is optional and frequently free-text in exports; anything that is
    # not an integer in 0..10 is treated as absent rather than rejected.
    value, ok = _parse_float(raw)
    if not ok or value is None or value != int(value) or not 0 <= value <= 10:
        return None
    return int(value)


def load_records(path: str) -> tuple[list[TriageRecord], list[ParseDiagnostic]]:
    """Read a triage-table file into records plus per-row parse diagnostics.

    Well-formed rows become records (blank vitals load as None and are
    handled by the cleaning pass); rows with unparseable numeric fields are
    excluded and reported, never silently dropped. A missing acuity column
    is a hard error.
    """
    if not os.path.exists(path):
        raise DataError(f"input file not found: {path}")
    records: list[TriageRecord] = []
    diagnostics: list[ParseDiagnostic] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"empty input file: {path}") from None
        columns = [h.strip().lower() for h in header]
        if "acuity" not in columns:
            raise DataError(f"missing mandatory column 'acuity' in {path}")
        col_index = {name: i for i, name in enumerate(columns) if name in _COLUMN_MAP}

        for row_num, row in enumerate(reader, start=1):
            fields: dict = {}
            row_ok = True
            for column, idx in col_index.items():
                raw = row[idx] if idx < len(row) else ""
                field = _COLUMN_MAP[column]
                if field == "chief_complaint":
                    fields[field] = raw.strip() or None
                elif field == "pain":
                    fields[field] = _parse_pain(raw)
                elif field == "acuity":
                    value, ok = _parse_float(raw)
                    if not ok or (value is not None and (value != int(value) or int(value) not in ACUITY_LEVELS)):
                        diagnostics.append(ParseDiagnostic(row_num, column, raw, "invalid acuity"))
                        row_ok = False
                    else:
                        fields[field] = None if value is None else int(value)
                else:
                    value, ok = _parse_float(raw)
                    if not ok:
                        diagnostics.append(ParseDiagnostic(row_num, column, raw, "non-numeric value"))
                        row_ok = False
                    else:
                        fields[field] = value
            if not row_ok:
                continue
            vitals = VitalSigns(**{f: fields.get(f) for f in VITAL_FIELDS + ("pain",)})
            records.append(TriageRecord(vitals=vitals,
                                        acuity=fields.get("acuity"),
                                        chief_complaint=fields.get("chief_complaint")))
    return records, diagnostics


def save_records(path: str, records: list[TriageRecord]) -> None:
    """Write records in the same tabular format load_records reads."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for rec in records:
            row = []
            for column in CSV_COLUMNS:
                field = _COLUMN_MAP[column]
                if field == "acuity":
                    value = rec.acuity
                elif field == "chief_complaint":
                    value = rec.chief_complaint
                else:
                    value = getattr(rec.vitals, field)
                row.append("" if value is None else value)
            writer.writerow(row)


def feature_values(record: TriageRecord, features, row_index: int | None = None) -> list[float]:
    """Extract feature values from a record, rejecting missing ones."""
    values = []
    for feature in features:
        value = record.vitals.get(feature)
        if value is None:
            where = f" in row {row_index}" if row_index is not None else ""
            raise DataError(f"missing feature {feature!r}{where}")
        values.append(value)
    return values
