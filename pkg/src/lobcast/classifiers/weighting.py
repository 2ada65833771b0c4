"""Class-frequency-adjusted regularisation weights.

The classes are ordered (-1, 0, +1) everywhere; argmax tie-breaking
and one-vs-rest machine layout both follow this order. The weight for
class i scales a base constant by one third of the inverse class
frequency, so C_i * N_i = N * C / 3 holds (up to float rounding) and
rare classes get proportionally looser regularisation.
"""

import numpy as np

from ..validation import CLASS_ORDER, check_labels


def class_counts(y) -> np.ndarray:
    y = check_labels(y)
    return np.array([int(np.sum(y == c)) for c in CLASS_ORDER], dtype=np.int64)


def class_weights(counts, base: float) -> np.ndarray:
    """Per-class constants C_i = (N * base / 3) / N_i.

    A class absent from the data keeps the unscaled base: its
    one-vs-rest machine has no positives to upweight, and a zero count
    must not divide.
    """
    counts = np.asarray(counts, dtype=np.float64)
    total = counts.sum()
    out = np.full(len(counts), float(base))
    present = counts > 0
    out[present] = (total * base / 3.0) / counts[present]
    return out


def sample_weights(y, class_weighted: bool = True) -> np.ndarray:
    """Per-sample loss multipliers from inverse class frequency."""
    y = check_labels(y)
    if not class_weighted:
        return np.ones(len(y))
    w = class_weights(class_counts(y), 1.0)
    lookup = {c: w[i] for i, c in enumerate(CLASS_ORDER)}
    return np.array([lookup[c] for c in y])
