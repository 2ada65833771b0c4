"""k-means quantiser tests."""

import numpy as np
import pytest

from lobcast.errors import DataError, NotFittedError
from lobcast.repr_learning import KMeans


def blobs(n, centers, spread, seed, d=4):
    rng = np.random.default_rng(seed)
    pts = rng.normal(size=(centers, d)) * 10
    X = np.vstack([pts[rng.integers(0, centers)] + rng.normal(0, spread, d)
                   for _ in range(n)])
    return X


class TestKMeans:
    def test_inertia_trace_monotone_over_seeds(self):
        X = blobs(600, centers=6, spread=0.8, seed=0)
        for seed in range(10):
            km = KMeans(n_clusters=8, seed=seed).fit(X)
            trace = km.inertia_trace_
            assert len(trace) >= 2
            assert (np.diff(trace) <= 1e-9 * np.maximum(trace[:-1], 1.0)).all()

    def test_k1_centroid_is_sample_mean(self):
        rng = np.random.default_rng(1)
        X = rng.normal(3.0, 2.0, size=(500, 7))
        km = KMeans(n_clusters=1, seed=0).fit(X)
        np.testing.assert_allclose(km.centers_[0], X.mean(axis=0), atol=1e-12)

    def test_k_equals_n_distinct_points(self):
        rng = np.random.default_rng(2)
        X = rng.normal(size=(16, 3))
        km = KMeans(n_clusters=16, seed=5).fit(X)
        # every point is its own centroid
        got = {tuple(np.round(c, 12)) for c in km.centers_}
        want = {tuple(np.round(x, 12)) for x in X}
        assert got == want
        assert km.inertia_ == pytest.approx(0.0, abs=1e-12)

    def test_empty_cluster_repair_keeps_k_centers(self):
        # heavy duplication invites empty clusters after the first update
        X = np.repeat(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]), 40, axis=0)
        X = X + 0  # no noise: only 3 distinct locations
        km = KMeans(n_clusters=5, seed=3).fit(X)
        assert km.centers_.shape == (5, 2)
        trace = km.inertia_trace_
        assert (np.diff(trace) <= 1e-12).all()

    def test_deterministic_per_seed(self):
        X = blobs(300, centers=4, spread=1.0, seed=4)
        a = KMeans(n_clusters=6, seed=11).fit(X)
        b = KMeans(n_clusters=6, seed=11).fit(X)
        assert a.centers_.tobytes() == b.centers_.tobytes()
        c = KMeans(n_clusters=6, seed=12).fit(X)
        assert a.centers_.tobytes() != c.centers_.tobytes()

    def test_seeding_samples_data_points(self):
        X = blobs(50, centers=3, spread=0.5, seed=6)
        km = KMeans(n_clusters=4, max_iters=0, seed=7)
        km.max_iters = 0
        km.fit(X)
        rows = {tuple(r) for r in X}
        assert all(tuple(c) in rows for c in km.centers_)

    def test_predict_and_transform(self):
        X = blobs(200, centers=3, spread=0.3, seed=8)
        km = KMeans(n_clusters=3, seed=0).fit(X)
        labels = km.predict(X)
        assert labels.shape == (200,)
        D = km.transform(X[:5])
        assert D.shape == (5, 3)
        assert (D >= 0).all()
        np.testing.assert_array_equal(np.argmin(D, axis=1), labels[:5])

    def test_errors(self):
        with pytest.raises(NotFittedError):
            KMeans().predict(np.ones((2, 2)))
        with pytest.raises(DataError):
            KMeans(n_clusters=10).fit(np.ones((5, 2)))
        with pytest.raises(DataError):
            KMeans(n_clusters=0).fit(np.ones((5, 2)))
