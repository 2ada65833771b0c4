import numpy as np
import pytest

from lobcast.classifiers import AdamMLP, RBFPrototypeSLFN, SGDLinearSVM
from lobcast.errors import DataError
from lobcast.features.scaler import ZScoreScaler
from lobcast.model_io import (load_estimator, read_model, save_estimator,
                              write_model)
from lobcast.repr_learning import Autoencoder, BagOfFeatures, KMeans


def blobs(n=120, seed=0):
    rng = np.random.default_rng(seed)
    X = np.vstack([rng.normal(c, 0.3, size=(n // 3, 2))
                   for c in ([-3, 0], [0, 3], [3, 0])])
    y = np.repeat([-1, 0, 1], n // 3)
    return X, y


class TestContainer:
    def test_round_trip_bit_exact(self, tmp_path):
        rng = np.random.default_rng(1)
        arrays = {
            "a": rng.normal(size=(7, 3)),
            "b": rng.normal(size=11),
            "scalar": np.array(np.pi),
            "ints": np.arange(9.0).reshape(3, 3),
        }
        path = tmp_path / "m.lobm"
        write_model(path, "demo", {"alpha": 0.1, "name": "x"}, arrays)
        kind, params, loaded = read_model(path)
        assert kind == "demo"
        assert params == {"alpha": 0.1, "name": "x"}
        assert set(loaded) == set(arrays)
        for name, arr in arrays.items():
            assert loaded[name].tobytes() == np.asarray(arr, float).tobytes()
            assert loaded[name].shape == np.asarray(arr).shape

    def test_identical_models_identical_bytes(self, tmp_path):
        arrays = {"w": np.linspace(0, 1, 12).reshape(3, 4)}
        a, b = tmp_path / "a.lobm", tmp_path / "b.lobm"
        write_model(a, "demo", {"k": 3}, dict(arrays))
        write_model(b, "demo", {"k": 3}, dict(reversed(list(arrays.items()))))
        assert a.read_bytes() == b.read_bytes()

    def test_corruption_detected(self, tmp_path):
        path = tmp_path / "m.lobm"
        write_model(path, "demo", {}, {"w": np.ones(4)})
        raw = bytearray(path.read_bytes())

        bad_magic = tmp_path / "bad1.lobm"
        bad_magic.write_bytes(b"XXXX" + raw[4:])
        with pytest.raises(DataError, match="not a model"):
            read_model(bad_magic)

        truncated = tmp_path / "bad2.lobm"
        truncated.write_bytes(raw[:-8])
        with pytest.raises(DataError, match="truncated"):
            read_model(truncated)

        trailing = tmp_path / "bad3.lobm"
        trailing.write_bytes(bytes(raw) + b"\x00")
        with pytest.raises(DataError, match="trailing"):
            read_model(trailing)


class TestEstimatorRoundTrips:
    def test_scaler(self, tmp_path):
        X, _ = blobs()
        est = ZScoreScaler().fit(X)
        save_estimator(tmp_path / "s.lobm", est)
        back = load_estimator(tmp_path / "s.lobm")
        np.testing.assert_array_equal(back.transform(X), est.transform(X))

    def test_kmeans(self, tmp_path):
        X, _ = blobs()
        est = KMeans(n_clusters=4, seed=0).fit(X)
        save_estimator(tmp_path / "k.lobm", est)
        back = load_estimator(tmp_path / "k.lobm")
        np.testing.assert_array_equal(back.centers_, est.centers_)
        np.testing.assert_array_equal(back.predict(X), est.predict(X))

    def test_autoencoder(self, tmp_path):
        rng = np.random.default_rng(3)
        X = rng.normal(size=(100, 6))
        est = Autoencoder(hidden=(4, 2, 4), epochs=2, seed=1).fit(X)
        save_estimator(tmp_path / "a.lobm", est)
        back = load_estimator(tmp_path / "a.lobm")
        np.testing.assert_array_equal(back.transform(X), est.transform(X))
        assert back.code_dim == est.code_dim

    def test_bag_of_features(self, tmp_path):
        rng = np.random.default_rng(4)
        windows = rng.normal(size=(40, 5, 6))
        est = BagOfFeatures(n_codewords=8, seed=0).fit(
            windows.reshape(-1, 6))
        save_estimator(tmp_path / "b.lobm", est)
        back = load_estimator(tmp_path / "b.lobm")
        np.testing.assert_array_equal(back.transform(windows),
                                      est.transform(windows))

    @pytest.mark.parametrize("factory", [
        lambda: SGDLinearSVM(C=0.02, epochs=3, seed=0),
        lambda: RBFPrototypeSLFN(n_prototypes=6, epochs=3, seed=0),
        lambda: AdamMLP(hidden=(8, 8), epochs=3, seed=0),
    ])
    def test_classifiers(self, tmp_path, factory):
        X, y = blobs()
        est = factory().fit(X, y)
        save_estimator(tmp_path / "c.lobm", est)
        back = load_estimator(tmp_path / "c.lobm")
        np.testing.assert_array_equal(back.predict(X), est.predict(X))
        assert type(back).__name__ == type(est).__name__
        for key, value in est.get_params().items():
            got = back.get_params()[key]
            if isinstance(value, tuple):
                assert tuple(got) == value
            else:
                assert got == value
