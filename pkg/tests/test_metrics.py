"""Metric oracles and split behavior."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from carekg.errors import UndefinedMetricError, UsageError
from carekg.evalharness import (auc_ovr_macro, classification_report, f1_scores,
                                make_split)


def pair_count_auc(y_true, probs, n_classes=3):
    """O(n^2) oracle: wins + half-ties over all (positive, negative) pairs."""
    aucs = []
    for k in range(n_classes):
        pos = [p[k] for y, p in zip(y_true, probs) if y == k]
        neg = [p[k] for y, p in zip(y_true, probs) if y != k]
        if not pos or not neg:
            continue
        score = 0.0
        for a in pos:
            for b in neg:
                score += 1.0 if a > b else (0.5 if a == b else 0.0)
        aucs.append(score / (len(pos) * len(neg)))
    return float(np.mean(aucs))


def test_perfect_predictions():
    out = f1_scores([0, 1, 2, 1], [0, 1, 2, 1])
    np.testing.assert_array_equal(out["per_class"], [1.0, 1.0, 1.0])
    assert out["f1_macro"] == out["f1_weighted"] == out["accuracy"] == 1.0


def test_all_predicted_as_first_class():
    y_true = [0, 1, 2] * 4
    y_pred = [0] * 12
    out = f1_scores(y_true, y_pred)
    assert out["accuracy"] == pytest.approx(1 / 3)
    assert out["per_class"][0] == pytest.approx(0.5)
    assert out["per_class"][1] == out["per_class"][2] == 0.0
    assert out["f1_macro"] == pytest.approx(1 / 6)


def test_absent_class_scores_zero():
    out = f1_scores([0, 0, 1], [0, 1, 0])
    assert out["per_class"][2] == 0.0


def test_f1_input_validation():
    with pytest.raises(UsageError):
        f1_scores([0, 1], [0])
    with pytest.raises(UsageError):
        f1_scores([], [])


def test_one_hot_probabilities_are_perfect():
    y = [0, 1, 2, 0]
    probs = np.eye(3)[y]
    assert auc_ovr_macro(y, probs) == 1.0


def test_constant_probabilities_are_chance():
    y = [0, 1, 2, 0, 1, 2]
    probs = np.full((6, 3), 1 / 3)
    assert auc_ovr_macro(y, probs) == 0.5


def test_single_class_is_undefined():
    with pytest.raises(UndefinedMetricError):
        auc_ovr_macro([1, 1, 1], np.full((3, 3), 1 / 3))


def test_auc_shape_validation():
    with pytest.raises(UsageError):
        auc_ovr_macro([0, 1], np.zeros(2))


@settings(max_examples=200, deadline=None)
@given(st.data())
def test_auc_matches_pair_oracle_exactly(data):
    n = data.draw(st.integers(min_value=2, max_value=20))
    y = data.draw(st.lists(st.integers(0, 2), min_size=n, max_size=n))
    if len(set(y)) < 2:
        y[0] = (y[0] + 1) % 3
    # a coarse grid makes ties common, exercising the 0.5-credit path
    probs = np.array(data.draw(st.lists(
        st.tuples(*[st.sampled_from([0.0, 0.25, 0.5, 0.75, 1.0])] * 3),
        min_size=n, max_size=n)))
    assert auc_ovr_macro(y, probs) == pair_count_auc(y, probs)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_auc_is_rank_invariant(seed):
    rng = np.random.default_rng(seed)
    y = rng.integers(0, 3, size=15)
    if len(set(y.tolist())) < 2:
        y[0] = (y[0] + 1) % 3
    probs = rng.random((15, 3))
    monotone = np.column_stack([np.exp(2 * probs[:, 0]),
                                probs[:, 1] ** 3 + 5,
                                10 * probs[:, 2] - 1])
    assert auc_ovr_macro(y, probs) == pytest.approx(auc_ovr_macro(y, monotone), abs=1e-12)


def test_macro_f1_bounded_by_per_class_extremes():
    rng = np.random.default_rng(0)
    for _ in range(50):
        y = rng.integers(0, 3, size=30)
        p = rng.integers(0, 3, size=30)
        out = f1_scores(y, p)
        assert out["per_class"].min() - 1e-12 <= out["f1_macro"] <= out["per_class"].max() + 1e-12


def test_classification_report_keys():
    y = [0, 1, 2, 0, 1, 2]
    probs = np.eye(3)[y]
    report = classification_report(y, y, probs)
    assert list(report) == ["f1_backhome", "f1_rehab", "f1_death", "f1_macro",
                            "f1_weighted", "accuracy", "auc"]


def test_split_of_ten_is_8_1_1():
    split = make_split([0] * 10, seed=0)
    assert (len(split.train), len(split.val), len(split.test)) == (8, 1, 1)


def test_split_partitions_the_index_set():
    y = np.array([0] * 50 + [1] * 30 + [2] * 20)
    split = make_split(y, seed=3)
    parts = [set(split.train), set(split.val), set(split.test)]
    assert parts[0] | parts[1] | parts[2] == set(range(100))
    assert not (parts[0] & parts[1] or parts[0] & parts[2] or parts[1] & parts[2])


def test_split_is_stratified_and_deterministic():
    y = np.array([0] * 88 + [1] * 87 + [2] * 25)
    a = make_split(y, seed=11)
    b = make_split(y, seed=11)
    for pa, pb in zip(a, b):
        np.testing.assert_array_equal(pa, pb)
    global_props = np.bincount(y) / y.size
    train_props = np.bincount(y[a.train], minlength=3) / a.train.size
    assert np.all(np.abs(train_props - global_props) * a.train.size <= 1.0 + 1e-9)


def test_split_rejects_tiny_inputs():
    with pytest.raises(UsageError):
        make_split([0] * 9, seed=0)
