"""Confusion matrix, per-class precision/recall/F1, macro-averaged F1.

Rows are gold labels, columns are predictions. Undefined precision or
recall (0/0) is taken as 0 so the scores stay total. Macro averaging is
the unweighted mean over the three classes; a support-weighted variant
exists for comparison.
"""

import numpy as np

from .errors import DataError, DimensionError

NUM_CLASSES = 3


def confusion(preds, golds):
    """Tally a 3x3 integer matrix: counts[gold][pred]."""
    if len(preds) != len(golds):
        raise DimensionError(f"{len(preds)} predictions vs {len(golds)} golds")
    cm = np.zeros((NUM_CLASSES, NUM_CLASSES), dtype=np.int64)
    for pred, gold in zip(preds, golds):
        if not (0 <= pred < NUM_CLASSES and 0 <= gold < NUM_CLASSES):
            raise DataError(f"class index out of range: pred={pred}, gold={gold}")
        cm[gold][pred] += 1
    return cm


def f1_from_pr(precision, recall):
    """Harmonic mean 2PR/(P+R), with 0 when both are 0."""
    if precision + recall == 0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def precision_recall(cm, c):
    """Precision and recall of class c, 0 where the denominator is 0."""
    tp = int(cm[c][c])
    col = int(cm[:, c].sum())
    row = int(cm[c, :].sum())
    precision = tp / col if col else 0.0
    recall = tp / row if row else 0.0
    return precision, recall


def f1_class(cm, c):
    precision, recall = precision_recall(cm, c)
    return f1_from_pr(precision, recall)


def per_class(cm):
    """(precision, recall, f1) for each class index in order."""
    return [(*precision_recall(cm, c), f1_class(cm, c)) for c in range(NUM_CLASSES)]


def macro_f1(cm):
    """Unweighted mean of the three per-class F1 scores."""
    return sum(f1_class(cm, c) for c in range(NUM_CLASSES)) / NUM_CLASSES


def weighted_f1(cm):
    """Support-weighted mean of per-class F1, for comparison runs."""
    total = int(cm.sum())
    if total == 0:
        return 0.0
    return sum(int(cm[c, :].sum()) * f1_class(cm, c) for c in range(NUM_CLASSES)) / total
