"""Deterministic seed fan-out.

A single run seed drives every stage; stages get fixed additive offsets,
inner substreams (per class, per robot/victim pair, per weak learner) get
hash-derived seeds so results never depend on execution order.
"""

import hashlib

STAGE_OFFSETS = {
    "preprocess": 11,
    "rebalance": 23,
    "synthesize": 37,
    "split": 53,
    "train": 71,
    "evaluate": 89,
    "compare": 101,
    "simulate": 131,
}


def stage_seed(run_seed: int, stage: str) -> int:
    if stage not in STAGE_OFFSETS:
        raise KeyError(f"unknown stage {stage!r}")
    return run_seed + STAGE_OFFSETS[stage]


def derive_seed(seed: int, *parts) -> int:
    """Stable sub-seed from a parent seed plus identifying parts.

    Hash-based so the result is platform independent and insensitive to how
    many other substreams were drawn before this one.
    """
    digest = hashlib.sha256(repr((seed,) + parts).encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")
