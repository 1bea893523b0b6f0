"""Wilcoxon signed-rank tests, cross-checked against scipy."""

import numpy as np
import pytest
from scipy import stats as scipy_stats

from fieldtriage.errors import DataError, InsufficientDataError
from fieldtriage.preprocess import feature_matrix, label_vector
from fieldtriage.records import MAIN_FEATURES
from fieldtriage.stats import ComparisonReport, compare_models, wilcoxon_one_tailed
from fieldtriage.synthesize import synthesize
from fieldtriage.tree import tree_fit

# ---------------------------------------------------------------- wilcoxon


def test_five_positive_differences():
    w, p = wilcoxon_one_tailed([2, 3, 4, 5, 6], [1, 2, 3, 4, 5])
    assert w == 0.0
    assert p == pytest.approx(1 / 32, abs=1e-15)  # one of 2^5 assignments


def test_five_negative_differences():
    w, p = wilcoxon_one_tailed([1, 2, 3, 4, 5], [2, 3, 4, 5, 6])
    assert w == 15.0
    assert p == 1.0  # every assignment has rank sum <= 15


def test_hand_worked_mixed_signs():
    # differences 1, 2, 3, -4, 5: the lone negative carries rank 4, and
    # 7 of the 32 sign assignments reach rank sum <= 4.
    a = [11, 12, 13, 10, 15]
    b = [10, 10, 10, 14, 10]
    w, p = wilcoxon_one_tailed(a, b)
    assert w == 4.0
    assert p == pytest.approx(7 / 32, abs=1e-15)


def test_identical_samples_are_insufficient():
    with pytest.raises(InsufficientDataError, match="5"):
        wilcoxon_one_tailed([1.0, 2.0, 3.0, 4.0, 5.0, 6.0],
                            [1.0, 2.0, 3.0, 4.0, 5.0, 6.0])


def test_too_few_nonzero_differences():
    a = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0]
    b = [1.0, 2.0, 0.0, 0.0, 0.0, 0.0]  # only four nonzero differences
    with pytest.raises(InsufficientDataError, match="got 4"):
        wilcoxon_one_tailed(a, b)


def test_shape_validation():
    with pytest.raises(DataError, match="equal-length"):
        wilcoxon_one_tailed([1, 2, 3], [1, 2])


def test_tied_absolute_differences_use_average_ranks():
    # |d| = 1,1,2,2,3 all positive: W = 0 and the exact table still has
    # exactly one favorable assignment out of 32.
    a = [2, 3, 4, 5, 6]
    b = [1, 2, 2, 3, 3]
    w, p = wilcoxon_one_tailed(a, b)
    assert w == 0.0
    assert p == pytest.approx(1 / 32, abs=1e-15)


@pytest.mark.parametrize("seed,n", [(0, 6), (1, 10), (2, 14), (3, 19),
                                    (4, 22), (5, 25)])
def test_exact_p_matches_scipy(seed, n):
    rng = np.random.default_rng(seed)
    a = rng.normal(loc=0.3, size=n)
    b = rng.normal(size=n)
    w, p = wilcoxon_one_tailed(a, b)
    oracle = scipy_stats.wilcoxon(a, b, alternative="greater", method="exact")
    assert p == pytest.approx(oracle.pvalue, abs=1e-12)
    # scipy reports the positive-rank sum; together they cover all ranks
    assert w + oracle.statistic == pytest.approx(n * (n + 1) / 2)


@pytest.mark.parametrize("seed,n", [(6, 30), (7, 45), (8, 80)])
def test_normal_approximation_matches_scipy(seed, n):
    rng = np.random.default_rng(seed)
    a = rng.normal(loc=0.2, size=n)
    b = rng.normal(size=n)
    _, p = wilcoxon_one_tailed(a, b)
    oracle = scipy_stats.wilcoxon(a, b, alternative="greater",
                                  method="approx", correction=True)
    assert p == pytest.approx(oracle.pvalue, abs=1e-10)


@pytest.mark.parametrize("seed,n", [(9, 20), (10, 23), (11, 25)])
def test_exact_and_normal_tails_agree_closely(seed, n):
    # Near the exact-method cutoff the two computations must tell the same
    # story: the normal approximation lands within 0.01 of the exact tail.
    rng = np.random.default_rng(seed)
    a = rng.normal(loc=0.3, size=n)
    b = rng.normal(size=n)
    _, exact_p = wilcoxon_one_tailed(a, b)
    approx = scipy_stats.wilcoxon(a, b, alternative="greater",
                                  method="approx", correction=True)
    assert abs(exact_p - approx.pvalue) < 0.01


def test_p_never_zero_even_for_extreme_samples():
    n = 200
    a = np.arange(1.0, n + 1.0) + 10.0
    b = np.arange(1.0, n + 1.0)
    _, p = wilcoxon_one_tailed(a, b)
    assert 0.0 < p < 1e-30


# ---------------------------------------------------------------- comparisons


@pytest.fixture(scope="module")
def comparison_corpus():
    return synthesize(400, seed=3)


def strong_and_weak_trees(records):
    inputs = feature_matrix(records, MAIN_FEATURES)
    labels = label_vector(records)
    strong = tree_fit(inputs, labels, features=MAIN_FEATURES)
    weak = tree_fit(inputs, labels, max_depth=0, features=MAIN_FEATURES)
    return strong, weak


def test_identical_models_reported_not_raised(comparison_corpus):
    strong, _ = strong_and_weak_trees(comparison_corpus)
    report = compare_models(strong, strong, comparison_corpus, n_subsets=10,
                            subset_fraction=0.25, seed=0)
    assert isinstance(report, ComparisonReport)
    assert report.insufficient_data is True
    assert report.p_value is None
    assert report.w_statistic is None
    assert report.ties == 10
    assert (report.wins_a, report.wins_b) == (0, 0)
    assert "nonzero" in report.reason


def test_stronger_model_wins_with_small_p(comparison_corpus):
    strong, weak = strong_and_weak_trees(comparison_corpus)
    report = compare_models(strong, weak, comparison_corpus, n_subsets=20,
                            subset_fraction=0.25, seed=1)
    assert report.insufficient_data is False
    assert report.wins_a == 20
    assert report.wins_b == 0
    assert report.w_statistic == 0.0
    assert report.p_value < 1e-5


def test_comparison_is_deterministic(comparison_corpus):
    strong, weak = strong_and_weak_trees(comparison_corpus)
    first = compare_models(strong, weak, comparison_corpus, n_subsets=8,
                           subset_fraction=0.2, seed=7)
    second = compare_models(strong, weak, comparison_corpus, n_subsets=8,
                            subset_fraction=0.2, seed=7)
    assert first == second
    shifted = compare_models(strong, weak, comparison_corpus, n_subsets=8,
                             subset_fraction=0.2, seed=8)
    assert shifted.n_subsets == first.n_subsets  # same shape, possibly same wins


def test_comparison_validation(comparison_corpus):
    strong, weak = strong_and_weak_trees(comparison_corpus)
    with pytest.raises(DataError, match="5"):
        compare_models(strong, weak, comparison_corpus, n_subsets=4)
    with pytest.raises(DataError, match="fraction"):
        compare_models(strong, weak, comparison_corpus, subset_fraction=0.0)
    with pytest.raises(DataError, match="empty"):
        compare_models(strong, weak, [])


def test_report_as_dict_round_trip(comparison_corpus):
    strong, weak = strong_and_weak_trees(comparison_corpus)
    report = compare_models(strong, weak, comparison_corpus, n_subsets=6,
                            subset_fraction=0.2, seed=2)
    data = report.as_dict()
    assert data["n_subsets"] == 6
    assert set(data) == {"n_subsets", "wins_a", "wins_b", "ties", "w_statistic",
                         "p_value", "insufficient_data", "reason"}
