"""Two-hidden-layer perceptron trained with Adam on weighted cross-entropy.

Hidden layers use rectified linear units; the output layer is a
three-way softmax over the classes in (-1, 0, +1) order. Per-sample
loss weights counteract class imbalance with inverse-frequency scaling.
"""

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from .. import nn
from ..errors import DivergenceError
from ..seeding import rng_for
from ..validation import check_labels, check_matrix, require_fitted
from .weighting import CLASS_ORDER, class_counts, class_weights

DIVERGENCE_FACTOR = 10.0
PROBE_ROWS = 4096


class AdamMLP(BaseEstimator, ClassifierMixin):

    def __init__(self, hidden=(512, 512), epochs: int = 20,
                 batch_size: int = 256, lr: float = 0.001,
                 class_weighted: bool = True, seed: int = 0):
        self.hidden = hidden
        self.epochs = epochs
        self.batch_size = batch_size
        self.lr = lr
        self.class_weighted = class_weighted
        self.seed = seed

    def fit(self, X, y):
        X = check_matrix(X, name="X")
        y = check_labels(y, n_samples=len(X))
        n = len(X)

        class_idx = np.searchsorted(CLASS_ORDER, y)
        if self.class_weighted:
            per_class = class_weights(class_counts(y), 1.0)
        else:
            per_class = np.ones(3)
        weights = per_class[class_idx]

        sizes = (X.shape[1], *self.hidden, len(CLASS_ORDER))
        rng = rng_for(self.seed, "mlp", "init")
        params = nn.glorot_uniform(sizes, rng)
        opt = nn.Adam(params, alpha=self.lr)

        probe = slice(0, min(n, PROBE_ROWS))
        initial_loss, _ = nn.cross_entropy_loss(
            params, X[probe], class_idx[probe], weights[probe], hidden="relu")
        ceiling = DIVERGENCE_FACTOR * max(initial_loss, 1e-12)

        shuffle = rng_for(self.seed, "mlp", "shuffle")
        self.loss_curve_ = []
        for epoch in range(self.epochs):
            order = shuffle.permutation(n)
            total = 0.0
            for start in range(0, n, self.batch_size):
                idx = order[start:start + self.batch_size]
                loss, grads = nn.cross_entropy_loss(
                    params, X[idx], class_idx[idx], weights[idx], hidden="relu")
                if not np.isfinite(loss) or loss > ceiling:
                    raise DivergenceError(
                        f"batch loss {loss:.3g} exceeded {ceiling:.3g} "
                        f"at epoch {epoch}; lower the learning rate")
                opt.step(params, grads)
                total += loss * len(idx)
            self.loss_curve_.append(total / n)

        self.params_ = params
        self.sizes_ = sizes
        self.classes_ = np.array(CLASS_ORDER)
        self.n_features_in_ = X.shape[1]
        return self

    def predict_proba(self, X):
        require_fitted(self, "params_")
        X = check_matrix(X, n_features=self.n_features_in_, name="X")
        logits = nn.output_activations(self.params_, X, hidden="relu")
        return nn.softmax(logits)

    def predict(self, X):
        proba = self.predict_proba(X)
        return self.classes_[np.argmax(proba, axis=1)]
