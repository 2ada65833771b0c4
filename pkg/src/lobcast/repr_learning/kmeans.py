"""Lloyd's k-means with seeded data-point initialisation.

Centers start as K distinct rows sampled uniformly from the data.
Each iteration assigns points to their nearest center, records the
inertia of that assignment, then moves every non-empty center to its
cluster mean; a center left empty is re-seeded on the point farthest
from its assigned center. Iteration stops when the largest center
shift drops below ``tol`` or after ``max_iters``. The recorded inertia
trace is non-increasing, which the tests lean on.
"""

import numpy as np
from sklearn.base import BaseEstimator

from ..errors import DataError
from ..validation import check_matrix, require_fitted

CENTER_SHIFT_TOL = 1e-9


def _pairwise_sq_dists(X, C, x_sq=None):
    """Squared euclidean distances, (n, k). Clipped at zero so float
    cancellation never produces tiny negatives."""
    if x_sq is None:
        x_sq = np.einsum("ij,ij->i", X, X)
    c_sq = np.einsum("ij,ij->i", C, C)
    d = x_sq[:, None] + c_sq[None, :] - 2.0 * (X @ C.T)
    np.maximum(d, 0.0, out=d)
    return d


class KMeans(BaseEstimator):
    """Vector quantiser; fit learns centers, predict assigns them."""

    def __init__(self, n_clusters: int = 128, max_iters: int = 100,
                 tol: float = CENTER_SHIFT_TOL, seed: int = 0):
        self.n_clusters = n_clusters
        self.max_iters = max_iters
        self.tol = tol
        self.seed = seed

    def fit(self, X, y=None):
        X = check_matrix(X)
        n, k = len(X), self.n_clusters
        if k < 1:
            raise DataError(f"n_clusters must be >= 1, got {k}")
        if n < k:
            raise DataError(f"{n} samples cannot seed {k} clusters")
        rng = np.random.Generator(np.random.PCG64(self.seed))
        centers = X[rng.choice(n, size=k, replace=False)].copy()
        x_sq = np.einsum("ij,ij->i", X, X)
        trace = []
        for _ in range(self.max_iters):
            d = _pairwise_sq_dists(X, centers, x_sq)
            assign = np.argmin(d, axis=1)
            best = d[np.arange(n), assign]
            trace.append(float(best.sum()))
            new_centers = centers.copy()
            for c in range(k):
                mask = assign == c
                if mask.any():
                    new_centers[c] = X[mask].mean(axis=0)
                else:
                    # re-seed a dead center on the worst-served point
                    worst = int(np.argmax(best))
                    new_centers[c] = X[worst]
                    best[worst] = 0.0
            shift = np.sqrt(np.max(np.sum((new_centers - centers) ** 2, axis=1)))
            centers = new_centers
            if shift < self.tol:
                break
        d = _pairwise_sq_dists(X, centers, x_sq)
        assign = np.argmin(d, axis=1)
        trace.append(float(d[np.arange(n), assign].sum()))
        self.centers_ = centers
        self.labels_ = assign
        self.inertia_ = trace[-1]
        self.inertia_trace_ = np.array(trace)
        return self

    def predict(self, X) -> np.ndarray:
        require_fitted(self, "centers_")
        X = check_matrix(X, n_features=self.centers_.shape[1])
        return np.argmin(_pairwise_sq_dists(X, self.centers_), axis=1)

    def transform(self, X) -> np.ndarray:
        """Euclidean distances to every center."""
        require_fitted(self, "centers_")
        X = check_matrix(X, n_features=self.centers_.shape[1])
        return np.sqrt(_pairwise_sq_dists(X, self.centers_))
