"""Self-describing binary container for fitted models.

Layout, all integers little-endian:

    magic "LOBM" | version u32 | kind_len u16 | kind utf-8
    params_len u32 | params JSON utf-8
    n_arrays u32 | per array: name_len u16, name utf-8,
                               ndim u8, shape u64 * ndim,
                               float64 payload row-major

Every payload is stored as float64, which round-trips the integer
metadata (layer sizes, flags) exactly and keeps the reader trivial.
Hyperparameters travel as JSON; Python float repr guarantees they
parse back bit-equal. Array names are written sorted so identical
models serialize to identical bytes.
"""

import json
import struct

import numpy as np

from .errors import DataError
from .features.scaler import ZScoreScaler
from .classifiers.mlp import AdamMLP
from .classifiers.slfn import RBFPrototypeSLFN
from .classifiers.svm import SGDLinearSVM
from .classifiers.weighting import CLASS_ORDER
from .repr_learning.autoencoder import Autoencoder
from .repr_learning.bof import BagOfFeatures
from .repr_learning.kmeans import KMeans

MAGIC = b"LOBM"
VERSION = 1


def write_model(path, kind: str, params: dict, arrays: dict) -> None:
    kind_b = kind.encode()
    params_b = json.dumps(params, sort_keys=True).encode()
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<IH", VERSION, len(kind_b)))
        fh.write(kind_b)
        fh.write(struct.pack("<I", len(params_b)))
        fh.write(params_b)
        fh.write(struct.pack("<I", len(arrays)))
        for name in sorted(arrays):
            arr = np.asarray(arrays[name], dtype=np.float64)
            name_b = name.encode()
            fh.write(struct.pack("<H", len(name_b)))
            fh.write(name_b)
            fh.write(struct.pack("<B", arr.ndim))
            fh.write(struct.pack(f"<{arr.ndim}Q", *arr.shape))
            fh.write(arr.tobytes())


def _take(fh, n, path, what):
    buf = fh.read(n)
    if len(buf) != n:
        raise DataError(f"{path}: truncated while reading {what}")
    return buf


def read_model(path):
    """Returns (kind, params, arrays)."""
    with open(path, "rb") as fh:
        if _take(fh, 4, path, "magic") != MAGIC:
            raise DataError(f"{path}: not a model container")
        version, kind_len = struct.unpack("<IH", _take(fh, 6, path, "header"))
        if version != VERSION:
            raise DataError(f"{path}: unsupported container version {version}")
        kind = _take(fh, kind_len, path, "kind").decode()
        (params_len,) = struct.unpack("<I", _take(fh, 4, path, "params size"))
        params = json.loads(_take(fh, params_len, path, "params").decode())
        (n_arrays,) = struct.unpack("<I", _take(fh, 4, path, "array count"))
        arrays = {}
        for _ in range(n_arrays):
            (name_len,) = struct.unpack("<H", _take(fh, 2, path, "name size"))
            name = _take(fh, name_len, path, "name").decode()
            (ndim,) = struct.unpack("<B", _take(fh, 1, path, "rank"))
            shape = struct.unpack(f"<{ndim}Q", _take(fh, 8 * ndim, path, "shape"))
            count = int(np.prod(shape, dtype=np.int64)) if ndim else 1
            payload = _take(fh, 8 * count, path, f"array {name}")
            arrays[name] = np.frombuffer(payload, dtype="<f8").reshape(shape).copy()
        if fh.read(1):
            raise DataError(f"{path}: trailing bytes after last array")
    return kind, params, arrays


# -- estimator adapters ------------------------------------------------

def _layers_to_arrays(params_list):
    out = {}
    for i, (W, b) in enumerate(params_list):
        out[f"W{i}"] = W
        out[f"b{i}"] = b
    return out


def _layers_from_arrays(arrays, n_layers):
    return [[arrays[f"W{i}"], arrays[f"b{i}"]] for i in range(n_layers)]


def save_estimator(path, est) -> None:
    """Persist any fitted estimator from this package."""
    params = est.get_params()
    if isinstance(est, ZScoreScaler):
        write_model(path, "zscore_scaler", params, {
            "mean": est.mean_, "std": est.std_,
            "dead": est.dead_, "scale": est.scale_})
    elif isinstance(est, KMeans):
        write_model(path, "kmeans", params, {
            "centers": est.centers_, "inertia_trace": est.inertia_trace_})
    elif isinstance(est, Autoencoder):
        arrays = _layers_to_arrays(est.params_)
        arrays["sizes"] = np.array(est.sizes_)
        arrays["loss_curve"] = est.loss_curve_
        arrays["final_lr"] = np.array(est.final_lr_)
        write_model(path, "autoencoder", params, arrays)
    elif isinstance(est, BagOfFeatures):
        write_model(path, "bag_of_features", params, {"codebook": est.codebook_})
    elif isinstance(est, SGDLinearSVM):
        write_model(path, "sgd_linear_svm", params, {
            "coef": est.coef_, "intercept": est.intercept_,
            "class_c": est.class_c_,
            "n_features": np.array(est.n_features_in_)})
    elif isinstance(est, RBFPrototypeSLFN):
        write_model(path, "rbf_slfn", params, {
            "prototypes": est.prototypes_, "sigma": np.array(est.sigma_),
            "coef": est.coef_, "intercept": est.intercept_,
            "class_c": est.class_c_,
            "n_features": np.array(est.n_features_in_)})
    elif isinstance(est, AdamMLP):
        arrays = _layers_to_arrays(est.params_)
        arrays["sizes"] = np.array(est.sizes_)
        arrays["loss_curve"] = np.array(est.loss_curve_)
        write_model(path, "adam_mlp", params, arrays)
    else:
        raise DataError(f"cannot serialize {type(est).__name__}")


def load_estimator(path):
    kind, params, arrays = read_model(path)
    if kind == "zscore_scaler":
        est = ZScoreScaler(**params)
        est.mean_ = arrays["mean"]
        est.std_ = arrays["std"]
        est.dead_ = arrays["dead"] != 0.0
        est.scale_ = arrays["scale"]
    elif kind == "kmeans":
        est = KMeans(**params)
        est.centers_ = arrays["centers"]
        est.inertia_trace_ = arrays["inertia_trace"]
        est.inertia_ = float(est.inertia_trace_[-1])
    elif kind == "autoencoder":
        est = Autoencoder(**_tupled(params, "hidden"))
        sizes = tuple(int(v) for v in arrays["sizes"])
        est.sizes_ = sizes
        est.params_ = _layers_from_arrays(arrays, len(sizes) - 1)
        est.code_layer_ = (len(sizes) - 1) // 2
        est.loss_curve_ = arrays["loss_curve"]
        est.final_lr_ = float(arrays["final_lr"])
    elif kind == "bag_of_features":
        est = BagOfFeatures(**params)
        est.codebook_ = arrays["codebook"]
    elif kind == "sgd_linear_svm":
        est = SGDLinearSVM(**params)
        _restore_machines(est, arrays)
    elif kind == "rbf_slfn":
        est = RBFPrototypeSLFN(**params)
        est.prototypes_ = arrays["prototypes"]
        est.sigma_ = float(arrays["sigma"])
        _restore_machines(est, arrays)
    elif kind == "adam_mlp":
        est = AdamMLP(**_tupled(params, "hidden"))
        sizes = tuple(int(v) for v in arrays["sizes"])
        est.sizes_ = sizes
        est.params_ = _layers_from_arrays(arrays, len(sizes) - 1)
        est.loss_curve_ = list(arrays["loss_curve"])
        est.classes_ = np.array(CLASS_ORDER)
        est.n_features_in_ = sizes[0]
    else:
        raise DataError(f"{path}: unknown model kind {kind!r}")
    return est


def _tupled(params, key):
    out = dict(params)
    if key in out and isinstance(out[key], list):
        out[key] = tuple(out[key])
    return out


def _restore_machines(est, arrays):
    est.coef_ = arrays["coef"]
    est.intercept_ = arrays["intercept"]
    est.class_c_ = arrays["class_c"]
    est.classes_ = np.array(CLASS_ORDER)
    est.n_features_in_ = int(arrays["n_features"])
