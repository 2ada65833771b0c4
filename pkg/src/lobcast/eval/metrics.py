"""Confusion matrices and macro-averaged scores, reported in percent.

Per-class precision, recall and F are computed first and then averaged
without weighting, so a degenerate always-one-class predictor scores
low even when that class dominates. Undefined ratios (0/0) count as 0.
"""

from dataclasses import dataclass, field

import numpy as np

from ..errors import DataError
from ..validation import CLASS_ORDER, check_labels


@dataclass(frozen=True)
class MetricsReport:
    confusion: np.ndarray          # rows = truth, cols = prediction
    class_precision: np.ndarray    # percent, class order (-1, 0, +1)
    class_recall: np.ndarray
    class_f: np.ndarray
    precision: float               # macro, percent
    recall: float
    f_score: float
    fold: str = field(default="")


def confusion_matrix(y_true, y_pred) -> np.ndarray:
    y_true = check_labels(y_true)
    y_pred = check_labels(y_pred, n_samples=len(y_true))
    if len(y_true) == 0:
        raise DataError("cannot score an empty prediction set")
    k = len(CLASS_ORDER)
    ti = np.searchsorted(CLASS_ORDER, y_true)
    pi = np.searchsorted(CLASS_ORDER, y_pred)
    out = np.zeros((k, k), dtype=np.int64)
    np.add.at(out, (ti, pi), 1)
    return out


def _safe_div(num, den):
    num = np.asarray(num, dtype=np.float64)
    den = np.asarray(den, dtype=np.float64)
    out = np.zeros_like(num)
    np.divide(num, den, out=out, where=den > 0)
    return out


def macro_scores(y_true, y_pred, fold: str = "") -> MetricsReport:
    cm = confusion_matrix(y_true, y_pred)
    tp = np.diag(cm).astype(np.float64)
    precision = _safe_div(tp, cm.sum(axis=0))
    recall = _safe_div(tp, cm.sum(axis=1))
    f = _safe_div(2.0 * precision * recall, precision + recall)
    return MetricsReport(
        confusion=cm,
        class_precision=precision * 100.0,
        class_recall=recall * 100.0,
        class_f=f * 100.0,
        precision=float(precision.mean() * 100.0),
        recall=float(recall.mean() * 100.0),
        f_score=float(f.mean() * 100.0),
        fold=fold,
    )
