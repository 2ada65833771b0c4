"""Regularisation constant search on contiguous-in-time validation folds.

Rows are assumed time-ordered. The training span is cut into
consecutive segments; each fold holds one segment out for validation
and fits on the remainder, so the search never shuffles future rows
into the past beyond what the surrounding protocol already allows.
"""

import numpy as np

from ..errors import DataError
from ..eval.metrics import macro_scores
from ..validation import check_labels, check_matrix

C_GRID = (1e-5, 1e-4, 1e-3, 1e-2, 1e-1)
N_FOLDS = 3


def contiguous_folds(n: int, n_folds: int = N_FOLDS):
    """Yield (train_idx, val_idx) pairs over consecutive segments."""
    if n < n_folds:
        raise DataError(f"need at least {n_folds} rows, got {n}")
    bounds = np.linspace(0, n, n_folds + 1).astype(int)
    all_idx = np.arange(n)
    for i in range(n_folds):
        lo, hi = bounds[i], bounds[i + 1]
        val = all_idx[lo:hi]
        train = np.concatenate([all_idx[:lo], all_idx[hi:]])
        yield train, val


def select_regularizer(make_classifier, X, y, grid=C_GRID,
                       n_folds: int = N_FOLDS):
    """Pick the grid value with the best mean validation macro F score.

    make_classifier maps a grid value to an unfitted estimator. Ties
    go to the smaller value. Returns (best_value, {value: mean_f}).
    """
    X = check_matrix(X, name="X")
    y = check_labels(y, n_samples=len(X))
    folds = list(contiguous_folds(len(X), n_folds))
    table = {}
    for c in grid:
        scores = []
        for train, val in folds:
            clf = make_classifier(c).fit(X[train], y[train])
            pred = clf.predict(X[val])
            scores.append(macro_scores(y[val], pred).f_score)
        table[c] = float(np.mean(scores))
    best = None
    for c in sorted(grid):
        if best is None or table[c] > table[best]:
            best = c
    return best, table
