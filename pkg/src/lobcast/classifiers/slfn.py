"""Single hidden layer network with radial basis units and hinge-loss output.

Hidden prototypes come from k-means on the training inputs, the kernel
width is the mean pairwise distance of a training subsample, and the
output layer is the same one-vs-rest machinery as the linear SVM, fed
with hidden activations exp(-||x - w||^2 / (2 sigma^2)).
"""

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from ..errors import DataError
from ..repr_learning.kmeans import KMeans
from ..seeding import rng_for
from ..validation import check_labels, check_matrix, require_fitted
from .svm import fit_one_vs_rest
from .weighting import CLASS_ORDER

# caps keep the quadratic-cost stages bounded on large training sets
PROTOTYPE_FIT_CAP = 100_000
SIGMA_SAMPLE_CAP = 2_000


def mean_pairwise_distance(X, rng, cap: int = SIGMA_SAMPLE_CAP) -> float:
    n = len(X)
    if n < 2:
        raise DataError("kernel width needs at least 2 rows")
    if n > cap:
        X = X[rng.choice(n, cap, replace=False)]
        n = cap
    sq = np.sum(X * X, axis=1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (X @ X.T)
    np.clip(d2, 0.0, None, out=d2)
    dist = np.sqrt(d2)
    iu = np.triu_indices(n, k=1)
    return float(dist[iu].mean())


class RBFPrototypeSLFN(BaseEstimator, ClassifierMixin):
    """Radial-basis hidden layer over k-means prototypes, linear machines on top."""

    def __init__(self, n_prototypes: int = 1000, C: float = 0.01,
                 epochs: int = 20, batch_size: int = 256, lr0: float = 0.01,
                 class_weighted: bool = True, kmeans_max_iters: int = 100,
                 seed: int = 0):
        self.n_prototypes = n_prototypes
        self.C = C
        self.epochs = epochs
        self.batch_size = batch_size
        self.lr0 = lr0
        self.class_weighted = class_weighted
        self.kmeans_max_iters = kmeans_max_iters
        self.seed = seed

    def hidden_activations(self, X) -> np.ndarray:
        """RBF responses in (0, 1]; 1 exactly when x sits on a prototype."""
        require_fitted(self, "prototypes_", "sigma_")
        X = check_matrix(X, n_features=self.prototypes_.shape[1], name="X")
        return self._hidden(X)

    def _hidden(self, X):
        proto_sq = getattr(self, "_proto_sq", None)
        if proto_sq is None or len(proto_sq) != len(self.prototypes_):
            proto_sq = np.sum(self.prototypes_ ** 2, axis=1)
            self._proto_sq = proto_sq
        sq = np.sum(X * X, axis=1)
        d2 = sq[:, None] + proto_sq - 2.0 * (X @ self.prototypes_.T)
        np.clip(d2, 0.0, None, out=d2)
        return np.exp(d2 / (-2.0 * self.sigma_ ** 2))

    def fit(self, X, y):
        X = check_matrix(X, name="X")
        y = check_labels(y, n_samples=len(X))
        if len(X) < self.n_prototypes:
            raise DataError(
                f"need at least n_prototypes={self.n_prototypes} rows, got {len(X)}")

        fit_rows = X
        if len(X) > PROTOTYPE_FIT_CAP:
            rng = rng_for(self.seed, "slfn", "subsample")
            fit_rows = X[rng.choice(len(X), PROTOTYPE_FIT_CAP, replace=False)]
        km = KMeans(n_clusters=self.n_prototypes,
                    max_iters=self.kmeans_max_iters, seed=self.seed)
        self.prototypes_ = km.fit(fit_rows).centers_
        self._proto_sq = np.sum(self.prototypes_ ** 2, axis=1)  # predict-path cache

        self.sigma_ = mean_pairwise_distance(X, rng_for(self.seed, "slfn", "sigma"))
        if self.sigma_ <= 0.0:
            raise DataError("kernel width is zero: all sampled rows identical")

        H = self._hidden(X)
        self.coef_, self.intercept_, self.class_c_ = fit_one_vs_rest(
            H, y, self.C, self.class_weighted, self.epochs,
            self.batch_size, self.lr0, self.seed, "slfn_out")
        self.classes_ = np.array(CLASS_ORDER)
        self.n_features_in_ = X.shape[1]
        return self

    def decision_function(self, X):
        require_fitted(self, "coef_")
        X = check_matrix(X, n_features=self.n_features_in_, name="X")
        return self._hidden(X) @ self.coef_.T + self.intercept_

    def predict(self, X):
        scores = self.decision_function(X)
        return self.classes_[np.argmax(scores, axis=1)]
