"""Direction labels from smoothed mid-prices.

For a per-block mid series p within one stock-day, the backward mean
b(t) averages the smoothing window ending at t (inclusive) and the
forward mean a(t) averages b over the horizon strictly after t. The
label compares their relative change against a threshold:

    +1  if a(t) > b(t) * (1 + threshold)
    -1  if a(t) < b(t) * (1 - threshold)
     0  otherwise

Both inequalities are strict, so a zero threshold still labels flat
stretches 0. All window means accumulate strictly left to right; the
vectorised implementation below performs the identical sequence of
float operations as a per-index scalar recomputation, so the two agree
bit for bit. Labels never cross a day boundary because the function
only ever sees one day's mids.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DataError

DEFAULT_SMOOTHING = 9

# horizon -> threshold pairing used throughout the experiments
HORIZON_THRESHOLDS = {1: 0.0001, 5: 0.0002, 10: 0.0003}


@dataclass(frozen=True)
class LabelParams:
    horizon: int                       # forward blocks averaged, excludes t
    threshold: float                   # relative dead zone
    smoothing: int = DEFAULT_SMOOTHING  # backward blocks averaged, includes t

    def __post_init__(self):
        if self.horizon < 1:
            raise DataError(f"horizon must be >= 1, got {self.horizon}")
        if self.smoothing < 1:
            raise DataError(f"smoothing must be >= 1, got {self.smoothing}")
        if self.threshold < 0:
            raise DataError(f"threshold must be >= 0, got {self.threshold}")


@dataclass(frozen=True)
class LabelSeries:
    """Labels for one stock-day, aligned to block indices.

    ``labels[i]`` belongs to block ``first + i``. Blocks before
    ``first`` lack a full smoothing window; blocks after
    ``first + len(labels) - 1`` lack a full forward horizon.
    """

    labels: np.ndarray
    first: int
    params: LabelParams | None

    @property
    def block_index(self) -> np.ndarray:
        return np.arange(self.first, self.first + len(self.labels))


def _running_mean(x: np.ndarray, width: int) -> np.ndarray:
    """Means of every ``width``-wide window, summed left to right.

    out[i] covers x[i : i + width]. Elementwise accumulation keeps the
    float operation order identical to a scalar loop over the window.
    """
    m = len(x) - width + 1
    acc = np.zeros(m)
    for k in range(width):
        acc += x[k: k + m]
    return acc / width


def smooth_mid(mid: np.ndarray, smoothing: int = DEFAULT_SMOOTHING) -> np.ndarray:
    """Backward mean b(t) for t >= smoothing - 1; NaN during warm-up."""
    mid = np.asarray(mid, dtype=np.float64)
    if mid.ndim != 1:
        raise DataError(f"mid series must be 1-D, got shape {mid.shape}")
    out = np.full(len(mid), np.nan)
    if len(mid) >= smoothing:
        out[smoothing - 1:] = _running_mean(mid, smoothing)
    return out


def label_series(mid: np.ndarray, params: LabelParams) -> LabelSeries:
    """Labels for every block with full backward and forward windows."""
    mid = np.asarray(mid, dtype=np.float64)
    if mid.ndim != 1:
        raise DataError(f"mid series must be 1-D, got shape {mid.shape}")
    if not np.isfinite(mid).all():
        raise DataError("mid series contains non-finite values")
    nb, na = params.smoothing, params.horizon
    first = nb - 1
    last = len(mid) - 1 - na
    if last < first:
        return LabelSeries(np.zeros(0, dtype=np.int64), first, params)
    b_all = _running_mean(mid, nb)          # b_all[i] = b(i + nb - 1)
    b = b_all[: last - first + 1]           # b(t) for t in [first, last]
    m = len(b)
    acc = np.zeros(m)
    for k in range(1, na + 1):              # a(t): horizon after t, in order
        acc += b_all[k: k + m]
    a = acc / na
    labels = np.zeros(m, dtype=np.int64)
    labels[a > b * (1.0 + params.threshold)] = 1
    labels[a < b * (1.0 - params.threshold)] = -1
    return LabelSeries(labels, first, params)


def count_classes(labels: np.ndarray) -> dict:
    labels = np.asarray(labels)
    return {c: int(np.sum(labels == c)) for c in (-1, 0, 1)}


# -- label files ------------------------------------------------------

LABEL_HEADER = "block_index,label"


def write_label_file(path: str, series: LabelSeries) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(LABEL_HEADER + "\n")
        for idx, lab in zip(series.block_index, series.labels):
            fh.write(f"{idx},{lab}\n")


def read_label_file(path: str, params: LabelParams | None = None) -> LabelSeries:
    indices, labels = [], []
    with open(path) as fh:
        header = fh.readline().strip()
        if header != LABEL_HEADER:
            raise DataError(f"{path}: bad header {header!r}")
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            try:
                idx_s, lab_s = line.split(",")
                idx, lab = int(idx_s), int(lab_s)
            except ValueError:
                raise DataError(f"{path}:{lineno}: expected 'int,int'") from None
            if lab not in (-1, 0, 1):
                raise DataError(f"{path}:{lineno}: label {lab} outside -1/0/+1")
            indices.append(idx)
            labels.append(lab)
    if indices and indices != list(range(indices[0], indices[0] + len(indices))):
        raise DataError(f"{path}: block_index must be contiguous")
    first = indices[0] if indices else 0
    return LabelSeries(np.array(labels, dtype=np.int64), first, params)
