"""Linear support vector machines trained with mini-batch subgradient descent.

Three binary one-vs-rest machines, one per class in (-1, 0, +1) order,
each minimising

    J(w, b) = lam * ||w||^2 + mean(max(0, 1 - t * (x.w + b)))

with lam = 1 / (C_i * n). Scaling the batch objective this way keeps
step sizes independent of the dataset size while preserving the same
minimiser as the constant-form primal. The bias is unregularised.
"""

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from ..seeding import rng_for
from ..validation import check_labels, check_matrix, require_fitted
from .weighting import CLASS_ORDER, class_counts, class_weights

LR_DECAY = 1e-4


def train_hinge_machine(X, targets, c_value, epochs, batch_size, lr0, rng):
    """Fit one binary machine; targets must be +-1. Returns (w, b)."""
    n, d = X.shape
    lam = 1.0 / (c_value * n)
    w = np.zeros(d)
    b = 0.0
    step = 0
    for _ in range(epochs):
        order = rng.permutation(n)
        for start in range(0, n, batch_size):
            idx = order[start:start + batch_size]
            Xb = X[idx]
            tb = targets[idx]
            margins = tb * (Xb @ w + b)
            viol = margins < 1.0
            lr = lr0 / (1.0 + LR_DECAY * step)
            grad_w = 2.0 * lam * w
            if np.any(viol):
                coef = tb[viol] / len(idx)
                grad_w = grad_w - coef @ Xb[viol]
                b += lr * coef.sum()
            w -= lr * grad_w
            step += 1
    return w, b


def fit_one_vs_rest(X, y, base_c, class_weighted, epochs, batch_size, lr0,
                    seed, stream: str):
    """Train the three machines; returns (W (3,d), b (3,), C per class)."""
    counts = class_counts(y)
    if class_weighted:
        c_per_class = class_weights(counts, base_c)
    else:
        c_per_class = np.full(3, float(base_c))
    W = np.zeros((3, X.shape[1]))
    bias = np.zeros(3)
    for i, cls in enumerate(CLASS_ORDER):
        targets = np.where(y == cls, 1.0, -1.0)
        rng = rng_for(seed, stream, str(cls))
        W[i], bias[i] = train_hinge_machine(
            X, targets, c_per_class[i], epochs, batch_size, lr0, rng)
    return W, bias, c_per_class


class SGDLinearSVM(BaseEstimator, ClassifierMixin):
    """One-vs-rest linear SVM; predicts the first class with maximal score."""

    def __init__(self, C: float = 0.01, epochs: int = 20, batch_size: int = 256,
                 lr0: float = 0.01, class_weighted: bool = True, seed: int = 0):
        self.C = C
        self.epochs = epochs
        self.batch_size = batch_size
        self.lr0 = lr0
        self.class_weighted = class_weighted
        self.seed = seed

    def fit(self, X, y):
        X = check_matrix(X, name="X")
        y = check_labels(y, n_samples=len(X))
        self.coef_, self.intercept_, self.class_c_ = fit_one_vs_rest(
            X, y, self.C, self.class_weighted, self.epochs,
            self.batch_size, self.lr0, self.seed, "svm")
        self.classes_ = np.array(CLASS_ORDER)
        self.n_features_in_ = X.shape[1]
        return self

    def decision_function(self, X):
        require_fitted(self, "coef_")
        X = check_matrix(X, n_features=self.n_features_in_, name="X")
        return X @ self.coef_.T + self.intercept_

    def predict(self, X):
        scores = self.decision_function(X)
        # np.argmax returns the first maximum, i.e. the lowest class on ties
        return self.classes_[np.argmax(scores, axis=1)]
