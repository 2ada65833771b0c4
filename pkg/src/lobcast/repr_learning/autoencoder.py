"""Bottleneck autoencoder over single feature vectors.

Symmetric tanh net with a linear reconstruction layer; the code is the
activation of the middle (narrowest) layer. Trained by minibatch SGD
with momentum on the mean squared reconstruction error. The learning
rate halves whenever an epoch fails to improve the best loss seen so
far by a relative margin, and training aborts if the loss ever blows
past ten times its starting value.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .. import nn
from ..errors import DataError, DivergenceError
from ..validation import check_matrix, require_fitted

DIVERGENCE_FACTOR = 10.0
PLATEAU_RTOL = 1e-4


class Autoencoder(BaseEstimator, TransformerMixin):
    def __init__(self, hidden=(72, 24, 72), epochs: int = 20,
                 batch_size: int = 256, lr: float = 0.01,
                 momentum: float = 0.9, seed: int = 0):
        self.hidden = hidden
        self.epochs = epochs
        self.batch_size = batch_size
        self.lr = lr
        self.momentum = momentum
        self.seed = seed

    def _sizes(self, d):
        return (d, *self.hidden, d)

    def fit(self, X, y=None):
        X = check_matrix(X)
        if len(self.hidden) % 2 == 0:
            raise DataError("hidden layer list must have an odd length")
        n, d = X.shape
        sizes = self._sizes(d)
        rng = np.random.Generator(np.random.PCG64(self.seed))
        params = nn.glorot_uniform(sizes, rng)
        opt = nn.SGDMomentum(params, lr=self.lr, momentum=self.momentum)

        probe = X[: min(n, 4096)]
        initial, _ = nn.squared_error_loss(params, probe, probe)
        guard = DIVERGENCE_FACTOR * max(initial, 1e-30)
        best = np.inf
        curve = []
        batch = self.batch_size
        for epoch in range(self.epochs):
            order = rng.permutation(n)
            total = 0.0
            for start in range(0, n, batch):
                rows = order[start: start + batch]
                Xb = X[rows]
                loss, grads = nn.squared_error_loss(params, Xb, Xb)
                if not np.isfinite(loss) or loss > guard:
                    raise DivergenceError(
                        f"reconstruction loss {loss:.6g} exceeded "
                        f"{DIVERGENCE_FACTOR}x initial {initial:.6g} "
                        f"(epoch {epoch}, lr {opt.lr:.4g})"
                    )
                opt.step(params, grads)
                total += loss * len(rows)
            epoch_loss = total / n
            curve.append(epoch_loss)
            if epoch_loss > best * (1.0 - PLATEAU_RTOL):
                opt.lr /= 2.0
            best = min(best, epoch_loss)

        self.params_ = params
        self.sizes_ = sizes
        self.code_layer_ = (len(sizes) - 1) // 2
        self.loss_curve_ = np.array(curve)
        self.final_lr_ = opt.lr
        return self

    @property
    def code_dim(self):
        return self.hidden[len(self.hidden) // 2]

    def transform(self, X) -> np.ndarray:
        """Encode: activations of the bottleneck layer."""
        require_fitted(self, "params_")
        X = check_matrix(X, n_features=self.sizes_[0])
        a = X
        for W, b in self.params_[: self.code_layer_]:
            a = np.tanh(a @ W + b)
        return a

    def reconstruct(self, X) -> np.ndarray:
        require_fitted(self, "params_")
        X = check_matrix(X, n_features=self.sizes_[0])
        return nn.output_activations(self.params_, X, "tanh")

    def reconstruction_loss(self, X) -> float:
        """Mean squared l2 reconstruction error over rows."""
        X = check_matrix(X, n_features=self.sizes_[0])
        diff = self.reconstruct(X) - X
        return float(np.sum(diff * diff)) / len(X)
