"""Plain-numpy feedforward core shared by the autoencoder and the MLP.

Parameters are a list of [W, b] pairs, W shaped (fan_in, fan_out).
Everything is float64 and deterministic given the generator passed in.
The loss functions return (scalar objective, gradients in the same
nested layout); objectives are means over the batch so gradients are
batch-size independent.
"""

import numpy as np

from .errors import NumericError


def glorot_uniform(sizes, rng) -> list:
    """Uniform(-s, s) with s = sqrt(6 / (fan_in + fan_out)); zero biases."""
    params = []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        s = np.sqrt(6.0 / (fan_in + fan_out))
        W = rng.uniform(-s, s, size=(fan_in, fan_out))
        b = np.zeros(fan_out)
        params.append([W, b])
    return params


def _hidden_forward(z, kind):
    if kind == "tanh":
        return np.tanh(z)
    if kind == "relu":
        return np.maximum(z, 0.0)
    raise ValueError(f"unknown hidden activation {kind!r}")


def _hidden_backward(a, z, kind):
    # derivative w.r.t. pre-activation, expressed from whichever is cheap
    if kind == "tanh":
        return 1.0 - a * a
    if kind == "relu":
        return (z > 0.0).astype(np.float64)
    raise ValueError(f"unknown hidden activation {kind!r}")


def forward(params, X, hidden: str):
    """All layer activations; the final layer stays linear.

    Returns (activations, preactivations): activations[0] is X and
    activations[-1] the linear output, left for the loss to interpret
    (identity for reconstruction, softmax inside cross-entropy).
    """
    acts = [X]
    pres = []
    a = X
    last = len(params) - 1
    for i, (W, b) in enumerate(params):
        z = a @ W + b
        pres.append(z)
        a = z if i == last else _hidden_forward(z, hidden)
        acts.append(a)
    return acts, pres


def output_activations(params, X, hidden: str) -> np.ndarray:
    return forward(params, X, hidden)[0][-1]


def softmax(z: np.ndarray) -> np.ndarray:
    shifted = z - z.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def _backprop(params, acts, pres, delta, hidden):
    """Gradients from the output-layer delta (dLoss/dz_last)."""
    grads = [None] * len(params)
    for i in range(len(params) - 1, -1, -1):
        a_prev = acts[i]
        grads[i] = [a_prev.T @ delta, delta.sum(axis=0)]
        if i > 0:
            delta = (delta @ params[i][0].T) * _hidden_backward(acts[i], pres[i - 1], hidden)
    return grads


def squared_error_loss(params, X, target, hidden="tanh"):
    """Mean over rows of the squared l2 reconstruction error."""
    acts, pres = forward(params, X, hidden)
    y = acts[-1]
    diff = y - target
    loss = float(np.sum(diff * diff)) / len(X)
    delta = (2.0 / len(X)) * diff
    return loss, _backprop(params, acts, pres, delta, hidden)


def cross_entropy_loss(params, X, class_idx, sample_weight=None, hidden="relu"):
    """Weighted categorical cross-entropy over softmax outputs.

    ``class_idx`` holds column indices of the true class. The loss is
    the plain mean of per-sample weight times negative log-likelihood,
    stabilised with log-sum-exp so huge logits stay finite.
    """
    n = len(X)
    acts, pres = forward(params, X, hidden)
    z = acts[-1]
    zmax = z.max(axis=1, keepdims=True)
    shifted = z - zmax
    logsum = np.log(np.sum(np.exp(shifted), axis=1))
    nll = logsum - shifted[np.arange(n), class_idx]
    if sample_weight is None:
        sample_weight = np.ones(n)
    loss = float(np.sum(sample_weight * nll)) / n
    probs = np.exp(shifted)
    probs /= probs.sum(axis=1, keepdims=True)
    delta = probs
    delta[np.arange(n), class_idx] -= 1.0
    delta *= (sample_weight / n)[:, None]
    return loss, _backprop(params, acts, pres, delta, hidden)


class SGDMomentum:
    """Classic momentum: v <- mu v - lr g; p <- p + v."""

    def __init__(self, params, lr=0.01, momentum=0.9):
        self.lr = lr
        self.momentum = momentum
        self.velocity = [[np.zeros_like(W), np.zeros_like(b)] for W, b in params]

    def step(self, params, grads):
        for (W, b), (gW, gb), v in zip(params, grads, self.velocity):
            v[0] = self.momentum * v[0] - self.lr * gW
            v[1] = self.momentum * v[1] - self.lr * gb
            W += v[0]
            b += v[1]


class Adam:
    def __init__(self, params, alpha=0.001, beta1=0.9, beta2=0.999, eps=1e-8):
        self.alpha, self.beta1, self.beta2, self.eps = alpha, beta1, beta2, eps
        self.t = 0
        self.m = [[np.zeros_like(W), np.zeros_like(b)] for W, b in params]
        self.v = [[np.zeros_like(W), np.zeros_like(b)] for W, b in params]

    def step(self, params, grads):
        self.t += 1
        b1c = 1.0 - self.beta1 ** self.t
        b2c = 1.0 - self.beta2 ** self.t
        for p, g, m, v in zip(params, grads, self.m, self.v):
            for j in range(2):
                m[j] = self.beta1 * m[j] + (1.0 - self.beta1) * g[j]
                v[j] = self.beta2 * v[j] + (1.0 - self.beta2) * (g[j] * g[j])
                p[j] -= self.alpha * (m[j] / b1c) / (np.sqrt(v[j] / b2c) + self.eps)


def flatten_params(params) -> np.ndarray:
    return np.concatenate([np.concatenate([W.ravel(), b.ravel()]) for W, b in params])


def unflatten_params(vec, sizes) -> list:
    params = []
    pos = 0
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        W = vec[pos: pos + fan_in * fan_out].reshape(fan_in, fan_out).copy()
        pos += fan_in * fan_out
        b = vec[pos: pos + fan_out].copy()
        pos += fan_out
        params.append([W, b])
    if pos != len(vec):
        raise NumericError(f"parameter vector length {len(vec)} != layout {pos}")
    return params
