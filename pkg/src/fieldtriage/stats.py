"""Paired model comparison: one-tailed Wilcoxon signed-rank over data subsets.

The exact null distribution (all 2^n sign assignments) is used up to n = 25;
beyond that a normal approximation with continuity correction takes over.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DataError, InsufficientDataError
from .inference import predict_records
from .metrics import evaluate
from .preprocess import label_vector
from .records import TriageRecord
from .seeds import derive_seed

EXACT_LIMIT = 25
MIN_NONZERO = 5


def _average_ranks(values: np.ndarray) -> np.ndarray:
    """Ranks 1..n with tied values sharing the mean of their rank range."""
    order = np.argsort(values, kind="stable")
    ranks = np.empty(values.shape[0], dtype=np.float64)
    i = 0
    while i < values.shape[0]:
        j = i
        while j + 1 < values.shape[0] and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2.0 + 1.0  # mean of ranks i+1..j+1
        i = j + 1
    return ranks


def _exact_p_at_most(ranks: np.ndarray, w: float) -> float:
    """P(rank-sum of a uniformly random sign assignment <= w), exactly.

    Works on doubled ranks so tied (half-integer) average ranks stay integral;
    the subset-sum table then counts assignments per achievable sum.
    """
    doubled = [int(round(2.0 * r)) for r in ranks]
    total = sum(doubled)
    counts = [0] * (total + 1)
    counts[0] = 1
    for rank in doubled:
        for s in range(total, rank - 1, -1):
            if counts[s - rank]:
                counts[s] += counts[s - rank]
    threshold = min(int(math.floor(2.0 * w + 1e-9)), total)
    favorable = sum(counts[: threshold + 1])
    return favorable / (2 ** len(doubled))


def _normal_p_at_most(ranks: np.ndarray, w: float) -> float:
    n = ranks.shape[0]
    mean = n * (n + 1) / 4.0
    variance = n * (n + 1) * (2 * n + 1) / 24.0
    # tie correction: each group of t equal ranks removes (t^3 - t)/48
    _, tie_sizes = np.unique(ranks, return_counts=True)
    variance -= float(((tie_sizes ** 3 - tie_sizes) / 48.0).sum())
    if variance <= 0:
        raise InsufficientDataError("all differences tied; variance is zero")
    z = (w + 0.5 - mean) / math.sqrt(variance)  # continuity correction
    return 0.5 * math.erfc(-z / math.sqrt(2.0))


def wilcoxon_one_tailed(sample_a, sample_b) -> tuple[float, float]:
    """Test H1: a > b, paired. Returns (W, one-tailed p).

    W is the sum of ranks of the negative differences a - b (small W favors
    the alternative). Zero differences are dropped; absolute differences are
    ranked with average ranks for ties.
    """
    a = np.asarray(sample_a, dtype=np.float64)
    b = np.asarray(sample_b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise DataError(f"paired samples must be equal-length vectors, got "
                        f"{a.shape} vs {b.shape}")
    differences = a - b
    differences = differences[differences != 0.0]
    n = differences.shape[0]
    if n < MIN_NONZERO:
        raise InsufficientDataError(
            f"need at least {MIN_NONZERO} nonzero paired differences, got {n}")
    ranks = _average_ranks(np.abs(differences))
    w = float(ranks[differences < 0].sum())
    if n <= EXACT_LIMIT:
        p = _exact_p_at_most(ranks, w)
    else:
        p = _normal_p_at_most(ranks, w)
    return w, max(min(p, 1.0), 5e-324)  # one-tailed p lives in (0, 1]


@dataclass(frozen=True)
class ComparisonReport:
    n_subsets: int
    wins_a: int
    wins_b: int
    ties: int
    w_statistic: float | None
    p_value: float | None
    insufficient_data: bool = False
    reason: str | None = None

    def as_dict(self) -> dict:
        return {
            "n_subsets": self.n_subsets,
            "wins_a": self.wins_a,
            "wins_b": self.wins_b,
            "ties": self.ties,
            "w_statistic": self.w_statistic,
            "p_value": self.p_value,
            "insufficient_data": self.insufficient_data,
            "reason": self.reason,
        }


def compare_models(model_a, model_b, records: list[TriageRecord],
                   n_subsets: int = 50, subset_fraction: float = 0.2,
                   seed: int = 0) -> ComparisonReport:
    """Macro-precision paired comparison over seeded random subsets.

    Each subset is an independent draw (records may recur across subsets).
    Too few nonzero paired differences — e.g. identical models — is reported
    in the result rather than raised, so callers always get the win counts.
    """
    if n_subsets < MIN_NONZERO:
        raise DataError(f"need at least {MIN_NONZERO} subsets, got {n_subsets}")
    if not 0.0 < subset_fraction <= 1.0:
        raise DataError(f"subset fraction must be in (0, 1], got {subset_fraction}")
    if not records:
        raise DataError("cannot compare models on an empty dataset")
    size = max(1, int(len(records) * subset_fraction))
    scores_a, scores_b = [], []
    for i in range(n_subsets):
        rng = np.random.default_rng(derive_seed(seed, "subset", i))
        chosen = rng.choice(len(records), size=size, replace=False)
        subset = [records[j] for j in chosen]
        truth = label_vector(subset)
        scores_a.append(evaluate(predict_records(model_a, subset), truth).macro_precision())
        scores_b.append(evaluate(predict_records(model_b, subset), truth).macro_precision())
    a = np.asarray(scores_a)
    b = np.asarray(scores_b)
    wins_a = int(np.sum(a > b))
    wins_b = int(np.sum(b > a))
    ties = n_subsets - wins_a - wins_b
    try:
        w, p = wilcoxon_one_tailed(a, b)
    except InsufficientDataError as exc:
        return ComparisonReport(n_subsets=n_subsets, wins_a=wins_a, wins_b=wins_b,
                                ties=ties, w_statistic=None, p_value=None,
                                insufficient_data=True, reason=str(exc))
    return ComparisonReport(n_subsets=n_subsets, wins_a=wins_a, wins_b=wins_b,
                            ties=ties, w_statistic=w, p_value=p)
