"""Classification metrics: per-class F1, averages, accuracy, and OvR AUC."""

import numpy as np
from scipy import stats

from ..errors import UndefinedMetricError, UsageError


def f1_scores(y_true, y_pred, n_classes=3):
    """Per-class F1 plus macro, weighted, and accuracy.

    Classes with an empty denominator (no predictions and no true
    members) score 0 by convention. Macro averages over all n_classes;
    weighted uses true-class support.
    """
    y_true = np.asarray(y_true, dtype=np.int64)
    y_pred = np.asarray(y_pred, dtype=np.int64)
    if y_true.shape != y_pred.shape:
        raise UsageError("y_true and y_pred must have the same length")
    if y_true.size == 0:
        raise UsageError("cannot score an empty prediction set")
    per_class = np.zeros(n_classes)
    support = np.zeros(n_classes)
    for k in range(n_classes):
        tp = np.sum((y_pred == k) & (y_true == k))
        fp = np.sum((y_pred == k) & (y_true != k))
        fn = np.sum((y_pred != k) & (y_true == k))
        denom = 2 * tp + fp + fn
        per_class[k] = 2 * tp / denom if denom > 0 else 0.0
        support[k] = np.sum(y_true == k)
    weighted = (float(np.dot(per_class, support) / support.sum())
                if support.sum() > 0 else 0.0)
    return {
        "per_class": per_class,
        "f1_macro": float(per_class.mean()),
        "f1_weighted": weighted,
        "accuracy": float(np.mean(y_true == y_pred)),
    }


def _binary_auc(scores, positive):
    """Rank-based AUC; tied scores share their average rank."""
    ranks = stats.rankdata(np.asarray(scores, dtype=np.float64), method="average")
    n_pos = int(positive.sum())
    n_neg = positive.size - n_pos
    rank_sum = float(ranks[positive].sum())
    return (rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def auc_ovr_macro(y_true, probs, n_classes=3):
    """One-vs-rest AUC averaged over classes present on both sides.

    Classes with no positive or no negative examples are skipped; if every
    class is skipped the metric is undefined and raises.
    """
    y_true = np.asarray(y_true, dtype=np.int64)
    probs = np.asarray(probs, dtype=np.float64)
    if probs.ndim != 2 or probs.shape[0] != y_true.size:
        raise UsageError(f"probs must be (n, {n_classes}), got {probs.shape}")
    aucs = []
    for k in range(n_classes):
        positive = y_true == k
        n_pos = int(positive.sum())
        if n_pos == 0 or n_pos == y_true.size:
            continue
        aucs.append(_binary_auc(probs[:, k], positive))
    if not aucs:
        raise UndefinedMetricError(
            "AUC undefined: every class lacks positive or negative examples")
    return float(np.mean(aucs))


def classification_report(y_true, y_pred, probs, n_classes=3):
    """The seven reported metrics as one flat dict."""
    f1 = f1_scores(y_true, y_pred, n_classes)
    return {
        "f1_backhome": float(f1["per_class"][0]),
        "f1_rehab": float(f1["per_class"][1]),
        "f1_death": float(f1["per_class"][2]),
        "f1_macro": f1["f1_macro"],
        "f1_weighted": f1["f1_weighted"],
        "accuracy": f1["accuracy"],
        "auc": auc_ovr_macro(y_true, probs, n_classes),
    }
