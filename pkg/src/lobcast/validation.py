"""Input validation helpers shared by the estimators."""

import numpy as np
from sklearn.utils.validation import check_array

from .errors import DataError, NotFittedError

# canonical class order shared by classifiers, metrics, and reports
CLASS_ORDER = (-1, 0, 1)


def check_matrix(X, n_features=None, name="X") -> np.ndarray:
    """Validate a 2-D float64 sample matrix.

    Rejects non-finite entries and, when given, a feature-count
    mismatch. Returns a float64 array (copying only when needed).
    """
    try:
        X = check_array(X, dtype=np.float64, ensure_2d=True)
    except ValueError as exc:
        raise DataError(f"{name}: {exc}") from None
    if n_features is not None and X.shape[1] != n_features:
        raise DataError(f"{name}: expected {n_features} features, got {X.shape[1]}")
    return X


def check_labels(y, n_samples=None) -> np.ndarray:
    """Validate a 1-D array of class labels in {-1, 0, +1}."""
    y = np.asarray(y)
    if y.ndim != 1:
        raise DataError(f"y: expected 1-D labels, got shape {y.shape}")
    if not np.isin(y, (-1, 0, 1)).all():
        bad = sorted(set(np.unique(y)) - {-1, 0, 1})
        raise DataError(f"y: labels outside {{-1, 0, +1}}: {bad}")
    if n_samples is not None and len(y) != n_samples:
        raise DataError(f"y: {len(y)} labels for {n_samples} samples")
    return y.astype(np.int64)


def require_fitted(est, *attrs):
    for attr in attrs:
        if getattr(est, attr, None) is None:
            raise NotFittedError(
                f"{type(est).__name__} is not fitted (missing {attr})"
            )
