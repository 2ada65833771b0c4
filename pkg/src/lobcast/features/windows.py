"""Fixed-length window views over per-block feature vectors.

A window is WINDOW consecutive vectors of one stock-day ending at the
block being classified. The plain representations derive from the
window alone: the newest vector, the window mean, their concatenation,
and the full window flattened oldest-first.
"""

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..errors import DataError

WINDOW = 5

PLAIN_REPRESENTATIONS = ("last", "mean", "last_mean", "concat")


def window_view(X: np.ndarray) -> np.ndarray:
    """(n - WINDOW + 1, WINDOW, d) read-only view, oldest vector first.

    Window i ends at row i + WINDOW - 1 of X.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise DataError(f"expected 2-D feature matrix, got shape {X.shape}")
    if len(X) < WINDOW:
        raise DataError(f"need at least {WINDOW} rows, got {len(X)}")
    return sliding_window_view(X, WINDOW, axis=0).swapaxes(1, 2)


def make_representation(window: np.ndarray, kind: str) -> np.ndarray:
    """Representation vector for one (WINDOW, d) window."""
    window = np.asarray(window, dtype=np.float64)
    if window.shape[0] != WINDOW:
        raise DataError(f"window must have {WINDOW} rows, got {window.shape}")
    if kind == "last":
        return window[-1].copy()
    if kind == "mean":
        return np.mean(window, axis=0)
    if kind == "last_mean":
        return np.concatenate([window[-1], np.mean(window, axis=0)])
    if kind == "concat":
        return window.reshape(-1).copy()
    raise DataError(f"unknown representation kind {kind!r}")


def build_representation(X: np.ndarray, kind: str) -> np.ndarray:
    """Representations for every full window of a stock-day matrix.

    Row i of the result is the representation of the window ending at
    block row i + WINDOW - 1 of X.
    """
    w = window_view(X)
    if kind == "last":
        return np.ascontiguousarray(w[:, -1])
    if kind == "mean":
        return np.mean(w, axis=1)
    if kind == "last_mean":
        return np.hstack([w[:, -1], np.mean(w, axis=1)])
    if kind == "concat":
        return w.reshape(len(w), -1)
    raise DataError(f"unknown representation kind {kind!r}")


def plain_dim(kind: str, d: int = 144) -> int:
    return {"last": d, "mean": d, "last_mean": 2 * d, "concat": WINDOW * d}[kind]
