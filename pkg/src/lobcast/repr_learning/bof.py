"""Bag-of-features window histograms over a learned codebook.

Each window member gets a fuzzy membership over the K codewords,
d_k = exp(-||v_k - x|| / g) with a plain (non-squared) euclidean norm,
normalised to unit l1; the window histogram is the mean of its member
memberships. Larger g flattens memberships toward uniform, smaller g
sharpens them toward hard assignment; if every codeword similarity
underflows, the membership falls back to exactly uniform.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from ..errors import DataError
from ..validation import check_matrix, require_fitted
from .kmeans import KMeans, _pairwise_sq_dists

UNDERFLOW_EPS = 1e-300
_CHUNK_ROWS = 65536


class BagOfFeatures(BaseEstimator, TransformerMixin):
    def __init__(self, n_codewords: int = 128, fuzziness: float = 0.01,
                 kmeans_max_iters: int = 100, seed: int = 0):
        self.n_codewords = n_codewords
        self.fuzziness = fuzziness
        self.kmeans_max_iters = kmeans_max_iters
        self.seed = seed

    def fit(self, X, y=None):
        """Learn the codebook by k-means over single feature vectors."""
        if self.fuzziness <= 0:
            raise DataError(f"fuzziness must be > 0, got {self.fuzziness}")
        X = check_matrix(X)
        km = KMeans(n_clusters=self.n_codewords,
                    max_iters=self.kmeans_max_iters, seed=self.seed)
        self.codebook_ = km.fit(X).centers_
        return self

    def memberships(self, V) -> np.ndarray:
        """Unit-l1 codeword memberships for single vectors, (m, K)."""
        require_fitted(self, "codebook_")
        V = check_matrix(V, n_features=self.codebook_.shape[1])
        out = np.empty((len(V), len(self.codebook_)))
        for lo in range(0, len(V), _CHUNK_ROWS):
            chunk = V[lo: lo + _CHUNK_ROWS]
            dist = np.sqrt(_pairwise_sq_dists(chunk, self.codebook_))
            sim = np.exp(-dist / self.fuzziness)
            total = sim.sum(axis=1)
            dead = total < UNDERFLOW_EPS
            if dead.any():
                sim[dead] = 1.0
                total[dead] = len(self.codebook_)
            out[lo: lo + len(chunk)] = sim / total[:, None]
        return out

    def transform(self, windows) -> np.ndarray:
        """Histograms for stacked windows shaped (n, window, d)."""
        require_fitted(self, "codebook_")
        W = np.asarray(windows, dtype=np.float64)
        if W.ndim != 3:
            raise DataError(f"expected (n, window, d) windows, got {W.shape}")
        n, w, d = W.shape
        u = self.memberships(W.reshape(n * w, d))
        return u.reshape(n, w, -1).mean(axis=1)

    def encode_window(self, window) -> np.ndarray:
        """Histogram for one (window, d) block of vectors."""
        window = np.asarray(window, dtype=np.float64)
        return self.transform(window[None])[0]
