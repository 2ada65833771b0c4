"""Experiment configuration: schema, validation, file round-trip.

Configs live as flat JSON objects. Every field has a declared type and
check; unknown keys are rejected rather than ignored so typos cannot
silently fall back to defaults. CLI flags override file values.

A representation is one of eight canonical kinds, each a fixed
combination of base parts (single vectors, window summaries, learned
codes). Arbitrary '+'-joined part combos are accepted only when
``unsafe_combo`` is set; they fall outside the evaluated grid.
"""

import json
from dataclasses import asdict, dataclass, fields

from .errors import DataError
from .eval.folds import ANCHORED_WALK_FORWARD, PROTOCOLS
from .labeling import HORIZON_THRESHOLDS

CLASSIFIERS = ("svm", "slfn", "mlp")

# base parts a representation row can be assembled from, with their
# dimensions under the 144-feature schema
PART_DIMS = {"last": 144, "mean": 144, "concat": 720, "ae": 24, "bof": 128}

# canonical representation kinds -> ordered part lists
REPRESENTATION_PARTS = {
    "last": ("last",),
    "mean": ("mean",),
    "last_mean": ("last", "mean"),
    "concat": ("concat",),
    "ae": ("ae",),
    "bof": ("bof",),
    "ae_bof": ("ae", "bof"),
    "last_bof": ("last", "bof"),
}
REPRESENTATIONS = tuple(REPRESENTATION_PARTS)

# input dimension per canonical kind
REP_DIMS = {k: sum(PART_DIMS[p] for p in parts)
            for k, parts in REPRESENTATION_PARTS.items()}


def representation_parts(kind: str, unsafe_combo: bool = False) -> tuple:
    """Ordered base parts for a representation kind string.

    Canonical kinds are always allowed. A '+'-joined combination of
    base parts (e.g. ``mean+bof``) needs ``unsafe_combo``.
    """
    if kind in REPRESENTATION_PARTS:
        return REPRESENTATION_PARTS[kind]
    parts = tuple(kind.split("+"))
    unknown = [p for p in parts if p not in PART_DIMS]
    if unknown:
        raise DataError(
            f"unknown representation {kind!r}; expected one of "
            f"{REPRESENTATIONS} or a '+'-combination of {tuple(PART_DIMS)}")
    if len(set(parts)) != len(parts):
        raise DataError(f"representation {kind!r} repeats a part")
    if not unsafe_combo:
        raise DataError(
            f"representation {kind!r} is outside the evaluated set; "
            "pass --unsafe-combo to run it anyway")
    return parts


def representation_dim(kind: str, unsafe_combo: bool = False) -> int:
    return sum(PART_DIMS[p] for p in representation_parts(kind, unsafe_combo))


@dataclass(frozen=True)
class ExperimentConfig:
    events_dir: str = ""         # corpus of event streams, or
    features_dir: str = ""       # corpus of feature matrices + label files
    out_dir: str = ""
    protocol: str = ANCHORED_WALK_FORWARD
    horizon: int = 10
    threshold: float = -1.0      # negative means: paired default for horizon
    representation: str = "concat"
    classifier: str = "svm"
    unsafe_combo: bool = False
    seed: int = 0
    epochs: int = 20             # classifier training epochs
    batch_size: int = 256
    select_c: bool = True        # 3-fold search for svm/slfn, else fixed_c
    fixed_c: float = 0.01
    ae_epochs: int = 20
    n_codewords: int = 128
    fuzziness: float = 0.01
    n_prototypes: int = 1000
    fit_cap: int = 100_000       # row cap for representation-learner fits
    n_jobs: int = 1

    def __post_init__(self):
        if self.protocol not in PROTOCOLS:
            raise DataError(f"protocol must be one of {PROTOCOLS}")
        representation_parts(self.representation, self.unsafe_combo)
        if self.classifier not in CLASSIFIERS:
            raise DataError(f"classifier must be one of {CLASSIFIERS}")
        if self.horizon < 1:
            raise DataError("horizon must be >= 1")
        if self.threshold < 0 and self.horizon not in HORIZON_THRESHOLDS:
            raise DataError(
                f"horizon {self.horizon} has no paired threshold; "
                "set `threshold` explicitly")
        for name in ("epochs", "batch_size", "ae_epochs", "n_codewords",
                     "n_prototypes", "fit_cap", "n_jobs"):
            if getattr(self, name) < 1:
                raise DataError(f"{name} must be >= 1")
        if self.fixed_c <= 0 or self.fuzziness <= 0:
            raise DataError("fixed_c and fuzziness must be positive")
        if self.events_dir and self.features_dir:
            raise DataError("set events_dir or features_dir, not both")

    @property
    def parts(self) -> tuple:
        return representation_parts(self.representation, self.unsafe_combo)

    @property
    def label_threshold(self) -> float:
        if self.threshold >= 0:
            return self.threshold
        return HORIZON_THRESHOLDS[self.horizon]

    @property
    def input_dim(self) -> int:
        # the histogram part tracks the configured codebook size
        return sum(self.n_codewords if p == "bof" else PART_DIMS[p]
                   for p in self.parts)

    def to_dict(self) -> dict:
        return asdict(self)

    def replace(self, **overrides) -> "ExperimentConfig":
        merged = {**self.to_dict(), **overrides}
        return from_dict(merged)


_FIELD_TYPES = {f.name: f.type for f in fields(ExperimentConfig)}
_BOOLS = {"select_c", "unsafe_combo"}
_INTS = {"horizon", "seed", "epochs", "batch_size", "ae_epochs",
         "n_codewords", "n_prototypes", "fit_cap", "n_jobs"}
_FLOATS = {"threshold", "fixed_c", "fuzziness"}


def from_dict(values: dict) -> ExperimentConfig:
    unknown = set(values) - set(_FIELD_TYPES)
    if unknown:
        raise DataError(f"unknown config keys: {sorted(unknown)}")
    coerced = {}
    for key, value in values.items():
        if key in _BOOLS:
            if not isinstance(value, bool):
                raise DataError(f"config key {key} must be a boolean")
        elif key in _INTS:
            if isinstance(value, bool) or not isinstance(value, int):
                raise DataError(f"config key {key} must be an integer")
        elif key in _FLOATS:
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise DataError(f"config key {key} must be a number")
            value = float(value)
        else:
            if not isinstance(value, str):
                raise DataError(f"config key {key} must be a string")
        coerced[key] = value
    return ExperimentConfig(**coerced)


def from_file(path) -> ExperimentConfig:
    try:
        with open(path) as fh:
            values = json.load(fh)
    except OSError as exc:
        raise DataError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(values, dict):
        raise DataError(f"{path}: config must be a JSON object")
    return from_dict(values)


def to_file(config: ExperimentConfig, path) -> None:
    with open(path, "w") as fh:
        json.dump(config.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
