"""Rule-labeled synthetic triage data.

Each acuity class has a template vital profile; draws are the template plus
independent Gaussian noise, clamped into the plausibility bounds, and kept
only if the labeling rules agree with the target class (rejection sampling).
Per-class counts come from largest-remainder apportionment of the mix, and
each class uses its own hash-derived random stream so output never depends
on generation order.
"""

from __future__ import annotations

import numpy as np

from .errors import DataError
from .records import VITAL_FIELDS, TriageRecord, VitalSigns, clamp_to_bounds
from .rules import RuleTable, default_rule_table
from .seeds import derive_seed

# Test-split class shares of the reference augmented dataset
# (1,642 / 1,870 / 4,124 / 42,518 / 8,082 of 58,236 records).
DEFAULT_CLASS_MIX = {1: 0.0282, 2: 0.0321, 3: 0.0708, 4: 0.7301, 5: 0.1388}

# Template vitals per class, ordered as VITAL_FIELDS:
# temperature, heart_rate, resp_rate, o2_sat, sbp, dbp.
CLASS_TEMPLATES = {
    1: (99.0, 138.0, 24.0, 80.0, 95.0, 60.0),
    2: (99.5, 118.0, 21.0, 88.0, 100.0, 66.0),
    3: (99.8, 103.0, 19.0, 93.0, 110.0, 72.0),
    4: (98.6, 90.0, 16.0, 96.0, 118.0, 79.0),
    5: (98.6, 75.0, 16.0, 98.0, 120.0, 80.0),
}

DEFAULT_NOISE_SIGMA = {
    "temperature": 0.6,
    "heart_rate": 6.0,
    "resp_rate": 2.0,
    "o2_sat": 1.8,
    "sbp": 7.0,
    "dbp": 5.0,
}

_MAX_DRAW_FACTOR = 1000  # give up if a class rejects this many times per record


def apportion_counts(count: int, class_mix: dict[int, float]) -> dict[int, int]:
    """Integer per-class counts by largest remainder; sums to count exactly.

    Every class lands within one record of its exact share count * mix.
    """
    if count <= 0:
        raise DataError(f"count must be positive, got {count}")
    for acuity, share in class_mix.items():
        if share < 0:
            raise DataError(f"negative mix share for class {acuity}: {share}")
    total_share = sum(class_mix.values())
    if abs(total_share - 1.0) > 1e-9:
        raise DataError(f"class mix must sum to 1, got {total_share}")
    exact = {a: count * share for a, share in class_mix.items()}
    counts = {a: int(x) for a, x in exact.items()}
    shortfall = count - sum(counts.values())
    # Hand leftover records to the largest fractional remainders; break ties
    # toward the more severe (lower-numbered) class for a stable result.
    remainders = sorted(class_mix, key=lambda a: (-(exact[a] - counts[a]), a))
    for acuity in remainders[:shortfall]:
        counts[acuity] += 1
    return counts


def _draw_class(acuity: int, n: int, sigmas: np.ndarray, table: RuleTable,
                seed: int) -> list[TriageRecord]:
    template = np.asarray(CLASS_TEMPLATES[acuity], dtype=np.float64)
    rng = np.random.default_rng(derive_seed(seed, "synthesize", acuity))
    records: list[TriageRecord] = []
    attempts = 0
    limit = max(n, 1) * _MAX_DRAW_FACTOR
    while len(records) < n:
        if attempts >= limit:
            raise DataError(
                f"synthesis for class {acuity} rejected {attempts} draws; "
                "rule table and templates are inconsistent")
        attempts += 1
        values = template + rng.standard_normal(len(VITAL_FIELDS)) * sigmas
        vitals = clamp_to_bounds(VitalSigns(**dict(zip(VITAL_FIELDS, values))))
        if table.label(vitals) != acuity:
            continue
        records.append(TriageRecord(vitals=vitals, acuity=acuity))
    return records


def synthesize(count: int,
               class_mix: dict[int, float] | None = None,
               noise_sigma_per_feature: dict[str, float] | None = None,
               table: RuleTable | None = None,
               seed: int = 0) -> list[TriageRecord]:
    """Generate rule-consistent synthetic records with the requested mix."""
    class_mix = class_mix if class_mix is not None else DEFAULT_CLASS_MIX
    sigmas_map = dict(DEFAULT_NOISE_SIGMA)
    if noise_sigma_per_feature:
        unknown = set(noise_sigma_per_feature) - set(VITAL_FIELDS)
        if unknown:
            raise DataError(f"unknown features in noise sigmas: {sorted(unknown)}")
        sigmas_map.update(noise_sigma_per_feature)
    sigmas = np.asarray([sigmas_map[f] for f in VITAL_FIELDS], dtype=np.float64)
    table = table if table is not None else default_rule_table()

    counts = apportion_counts(count, class_mix)
    records: list[TriageRecord] = []
    for acuity in sorted(counts):
        records.extend(_draw_class(acuity, counts[acuity], sigmas, table, seed))
    return records
