import itertools

import pytest

from fairlens import LabeledDataset, permutation_test
from fairlens.errors import ConfigurationError, DegenerateInputError, ValidationError

from conftest import make_dataset


def exhaustive_p(records, metric, observed, group_size):
    """Exact p over all equally likely group assignments of the given size.

    An assignment on which the rate is undefined counts as extreme, matching
    the engine's conservative rule. Returned without add-one smoothing.
    """

    def rate(subset):
        if metric == "positive_rate":
            num = sum(r.y_pred for r in subset)
            den = len(subset)
        elif metric == "tpr":
            num = sum(r.y_pred for r in subset if r.y_true == 1)
            den = sum(1 for r in subset if r.y_true == 1)
        else:
            raise AssertionError(metric)
        return None if den == 0 else num / den

    extreme = total = 0
    for first in itertools.combinations(records, group_size):
        rest = [r for r in records if r not in first]
        a, b = rate(first), rate(rest)
        total += 1
        if a is None or b is None or abs(a - b) >= observed:
            extreme += 1
    return extreme / total


PARITY_SIX = make_dataset(
    [(1, 1, "a"), (1, 1, "a"), (1, 1, "a"), (0, 0, "b"), (0, 0, "b"), (0, 0, "b")]
)


def test_exhaustive_parity_fixture():
    r = permutation_test(PARITY_SIX, "g", "positive_rate", n_permutations=4999, seed=3)
    assert r.statistic == 1.0
    # Only 2 of the 20 assignments reproduce a gap of 1.
    exact = exhaustive_p(PARITY_SIX.records, "positive_rate", 1.0, 3)
    assert exact == pytest.approx(0.1)
    assert r.p_value == pytest.approx(exact, abs=0.03)


def test_undefined_permutations_count_as_extreme():
    ds = make_dataset(
        [
            (1, 1, "a"),
            (1, 1, "a"),
            (1, 0, "b"),
            (0, 0, "a"),
            (0, 0, "b"),
            (0, 1, "b"),
        ]
    )
    r = permutation_test(ds, "g", "tpr", n_permutations=4999, seed=11)
    assert r.statistic == 1.0
    # 6 of 20 assignments reach the observed gap; 2 more are undefined and
    # count as extreme, so the exact conservative p is 0.4. Treating the
    # undefined ones as non-extreme (0.3) or skipping them (0.333) would land
    # outside the tolerance below.
    exact = exhaustive_p(ds.records, "tpr", 1.0, 3)
    assert exact == pytest.approx(0.4)
    assert r.p_value == pytest.approx(0.4, abs=0.03)


def test_same_seed_same_result():
    a = permutation_test(PARITY_SIX, "g", "positive_rate", 500, seed=7)
    b = permutation_test(PARITY_SIX, "g", "positive_rate", 500, seed=7)
    assert a == b


def test_record_order_invariance():
    shuffled = LabeledDataset(
        name=PARITY_SIX.name,
        records=tuple(reversed(PARITY_SIX.records)),
        protected_attributes=PARITY_SIX.protected_attributes,
    )
    a = permutation_test(PARITY_SIX, "g", "positive_rate", 500, seed=7)
    b = permutation_test(shuffled, "g", "positive_rate", 500, seed=7)
    assert a == b


def test_p_value_never_zero_or_above_one():
    r = permutation_test(PARITY_SIX, "g", "positive_rate", 1, seed=0)
    assert 0.0 < r.p_value <= 1.0
    big = make_dataset([(1, 1, "a"), (1, 1, "b")] * 10)
    r2 = permutation_test(big, "g", "positive_rate", 99, seed=0)
    # Zero observed gap: every permutation is at least as extreme.
    assert r2.p_value == 1.0


def test_doc_names_the_randomness():
    doc = permutation_test(PARITY_SIX, "g", "positive_rate", 10, seed=2).to_doc()
    assert doc["rng"] == "pcg64"
    assert doc["shuffle"] == "fisher-yates"
    assert doc["groups"] == ["a", "b"]
    assert doc["seed"] == 2


def test_rejects_non_binary_attribute():
    three = make_dataset([(1, 1, "a"), (0, 0, "b"), (1, 0, "c")])
    with pytest.raises(ConfigurationError):
        permutation_test(three, "g", "positive_rate", 10, seed=0)
    one = make_dataset([(1, 1, "a"), (0, 0, "a")])
    with pytest.raises(ConfigurationError):
        permutation_test(one, "g", "positive_rate", 10, seed=0)


def test_rejects_unknown_metric_and_attribute():
    with pytest.raises(ConfigurationError):
        permutation_test(PARITY_SIX, "g", "f1", 10, seed=0)
    with pytest.raises(ConfigurationError):
        permutation_test(PARITY_SIX, "height", "tpr", 10, seed=0)


def test_rejects_bad_permutation_count():
    with pytest.raises(ValidationError):
        permutation_test(PARITY_SIX, "g", "positive_rate", 0, seed=0)


def test_degenerate_observed_statistic():
    # No ground-truth positives at all: TPR undefined on both groups.
    ds = make_dataset([(0, 1, "a"), (0, 0, "a"), (0, 1, "b"), (0, 0, "b")])
    with pytest.raises(DegenerateInputError):
        permutation_test(ds, "g", "tpr", 10, seed=0)


def test_batching_gives_identical_stream():
    # Tiny dataset, many permutations: exercises multiple internal batches.
    r1 = permutation_test(PARITY_SIX, "g", "positive_rate", 3000, seed=5)
    r2 = permutation_test(PARITY_SIX, "g", "positive_rate", 3000, seed=5)
    assert r1.p_value == r2.p_value
