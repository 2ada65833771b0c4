"""Autoencoder training, encoding, and gradient correctness tests."""

import numpy as np
import pytest
from gradcheck import REL_TOL, max_rel_error

from lobcast import nn
from lobcast.errors import DataError, DivergenceError
from lobcast.repr_learning import Autoencoder


def correlated_data(n, d, seed):
    rng = np.random.default_rng(seed)
    latent = rng.normal(size=(n, max(2, d // 6)))
    mix = rng.normal(size=(latent.shape[1], d))
    return np.tanh(latent @ mix) + rng.normal(0, 0.05, size=(n, d))


class TestGradients:
    def test_reconstruction_gradients_match_finite_differences(self):
        sizes = (6, 4, 2, 4, 6)
        rng = np.random.default_rng(0)
        X = rng.normal(size=(8, 6))
        for _ in range(10):
            params = nn.glorot_uniform(sizes, rng)
            _, grads = nn.squared_error_loss(params, X, X)
            err = max_rel_error(
                grads, lambda p: nn.squared_error_loss(p, X, X)[0], params, sizes
            )
            assert err < REL_TOL


class TestAutoencoder:
    def test_encode_shape_and_code_dim(self):
        X = correlated_data(600, 144, seed=1)
        ae = Autoencoder(epochs=2, seed=0).fit(X)
        assert ae.code_dim == 24
        code = ae.transform(X[:10])
        assert code.shape == (10, 24)
        # tanh code stays in (-1, 1)
        assert (np.abs(code) < 1.0).all()
        assert ae.reconstruct(X[:10]).shape == (10, 144)

    def test_loss_decreases_on_structured_data(self):
        X = correlated_data(2000, 36, seed=2)
        ae = Autoencoder(hidden=(18, 6, 18), epochs=12, seed=3).fit(X)
        assert ae.loss_curve_[-1] < ae.loss_curve_[0] * 0.9

    def test_single_repeated_sample_beats_zero_model(self):
        rng = np.random.default_rng(4)
        x = rng.normal(size=12)
        X = np.tile(x, (256, 1))
        ae = Autoencoder(hidden=(8, 4, 8), epochs=40, seed=5).fit(X)
        zero_model = float(np.sum(x * x))
        assert ae.reconstruction_loss(X) < zero_model

    def test_divergence_guard_raises(self):
        X = correlated_data(512, 20, seed=6) * 10
        with pytest.raises(DivergenceError, match="exceeded"):
            Autoencoder(hidden=(12, 4, 12), epochs=10, lr=1e3, seed=7).fit(X)

    def test_deterministic_per_seed(self):
        X = correlated_data(512, 24, seed=8)
        a = Autoencoder(hidden=(12, 6, 12), epochs=3, seed=9).fit(X)
        b = Autoencoder(hidden=(12, 6, 12), epochs=3, seed=9).fit(X)
        assert nn.flatten_params(a.params_).tobytes() == nn.flatten_params(b.params_).tobytes()
        c = Autoencoder(hidden=(12, 6, 12), epochs=3, seed=10).fit(X)
        assert nn.flatten_params(a.params_).tobytes() != nn.flatten_params(c.params_).tobytes()

    def test_plateau_halves_learning_rate(self):
        # constant data converges immediately; later epochs cannot improve
        X = np.ones((512, 8))
        ae = Autoencoder(hidden=(4, 2, 4), epochs=10, seed=11).fit(X)
        assert ae.final_lr_ < ae.lr

    def test_rejects_even_hidden_stack(self):
        with pytest.raises(DataError):
            Autoencoder(hidden=(8, 4)).fit(np.ones((10, 6)))

    def test_glorot_bounds(self):
        rng = np.random.default_rng(12)
        params = nn.glorot_uniform((100, 50), rng)
        W, b = params[0]
        bound = np.sqrt(6.0 / 150)
        assert np.abs(W).max() <= bound
        assert (b == 0).all()
