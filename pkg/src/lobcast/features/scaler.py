"""Per-dimension standardisation fitted on training data only."""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from ..validation import check_matrix, require_fitted

ZERO_VARIANCE_EPS = 1e-12


class ZScoreScaler(BaseEstimator, TransformerMixin):
    """Subtract the mean and divide by the population standard deviation.

    Dimensions whose training standard deviation falls below
    ``zero_variance_eps`` carry no information; they are mapped to
    exactly zero instead of being blown up by a near-zero divisor.
    """

    def __init__(self, zero_variance_eps: float = ZERO_VARIANCE_EPS):
        self.zero_variance_eps = zero_variance_eps

    def fit(self, X, y=None):
        X = check_matrix(X)
        self.mean_ = X.mean(axis=0)
        self.std_ = X.std(axis=0)
        self.dead_ = self.std_ < self.zero_variance_eps
        self.scale_ = np.where(self.dead_, 1.0, self.std_)
        return self

    def transform(self, X) -> np.ndarray:
        require_fitted(self, "mean_")
        X = check_matrix(X, n_features=len(self.mean_))
        Z = (X - self.mean_) / self.scale_
        if self.dead_.any():
            Z[:, self.dead_] = 0.0
        return Z
