"""Experiment orchestration.

Ties corpus loading, per-fold representation fitting, classifier
training, and evaluation together, and persists everything a rerun
needs: a results table, per-fold predictor bundles, and a manifest.

Isolation is enforced structurally and then audited: each fit call
(normalization, autoencoder, codebook, C selection, classifier) records
the (stock, day) pairs its rows actually came from, and the audit
checks every recorded set against the fold's training selector.

Determinism contract: with an identical config (including seed), the
results table and every model artifact are byte-identical across runs.
The manifest additionally stores wall-clock timings, so it is excluded
from the byte-for-byte guarantee; ``replay_manifest`` instead verifies
the deterministic outputs against the manifest's recorded hashes.
"""

import glob
import hashlib
import json
import os
import sys
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__, model_io
from .book.events import read_events, read_meta
from .book.blocks import replay_day
from .classifiers import (AdamMLP, RBFPrototypeSLFN, SGDLinearSVM,
                          select_regularizer)
from .config import ExperimentConfig, from_dict
from .errors import DataError
from .eval.folds import FoldPlan, check_fold_isolation, make_fold_plan
from .eval.metrics import MetricsReport, macro_scores
from .features.extract import FIRST_VALID_BLOCK, day_feature_matrix
from .features.matrix_io import read_matrix
from .features.scaler import ZScoreScaler
from .features.windows import WINDOW, build_representation, window_view
from .labeling import (DEFAULT_SMOOTHING, LabelParams, LabelSeries,
                       label_series, read_label_file)
from .repr_learning import Autoencoder, BagOfFeatures
from .seeding import derive_seed, rng_for
from .validation import check_matrix

RESULTS_HEADER = ("protocol,horizon,representation,classifier,fold,"
                  "macro_precision,macro_recall,macro_f")
PREDICTIONS_HEADER = "block_index,label,score_-1,score_0,score_+1"

AE_HIDDEN = (72, 24, 72)
MLP_HIDDEN = (512, 512)


# -- corpus -----------------------------------------------------------

@dataclass
class DayInputs:
    """One stock-day ready for sampling: features plus aligned labels.

    ``features`` is the full per-block matrix including NaN warm-up
    rows, so row r always belongs to block r.
    """

    stock_id: str
    day_id: int
    features: np.ndarray
    labels: LabelSeries

    @property
    def pair(self):
        return (self.stock_id, self.day_id)


def _event_day_inputs(path, params: LabelParams) -> DayInputs:
    meta = read_meta(path)
    events, report = read_events(path)
    if report.malformed:
        warnings.warn(f"{path}: skipped {report.malformed} malformed rows")
    day = replay_day(events, meta)
    return DayInputs(
        stock_id=meta.stock_id,
        day_id=meta.day_id,
        features=day_feature_matrix(day),
        labels=label_series(day.mid, params),
    )


def _matrix_day_inputs(path, horizon: int) -> DayInputs:
    X, index = read_matrix(path)
    if index is None:
        raise DataError(f"{path}: missing row index sidecar")
    stocks = set(index.stock_id)
    days = set(index.day_id)
    if len(stocks) != 1 or len(days) != 1:
        raise DataError(f"{path}: expected one stock-day per matrix, "
                        f"got {sorted(stocks)} x {sorted(days)}")
    if not np.array_equal(index.block_index, np.arange(len(X))):
        raise DataError(f"{path}: rows must cover blocks 0..n-1 in order")
    label_file = f"{os.path.splitext(path)[0]}_h{horizon}.labels"
    if not os.path.exists(label_file):
        raise DataError(f"{path}: missing label file {label_file}")
    return DayInputs(
        stock_id=str(index.stock_id[0]),
        day_id=int(index.day_id[0]),
        features=np.asarray(X),
        labels=read_label_file(label_file),
    )


def load_days(events_dir: str = "", features_dir: str = "",
              horizon: int = 10, threshold: float = 0.0003,
              smoothing: int = DEFAULT_SMOOTHING, n_jobs: int = 1) -> list:
    """Load a corpus directory as a list of DayInputs.

    Event corpora are replayed and labeled with the given horizon and
    threshold; feature-matrix corpora come with precomputed label
    files, one per horizon.
    """
    if events_dir:
        params = LabelParams(horizon, threshold, smoothing)
        paths = sorted(glob.glob(os.path.join(events_dir, "*.csv")))
        if not paths:
            raise DataError(f"{events_dir}: no event files (*.csv)")
        load = lambda p: _event_day_inputs(p, params)
    elif features_dir:
        paths = sorted(glob.glob(os.path.join(features_dir, "*.lobf")))
        if not paths:
            raise DataError(f"{features_dir}: no matrices (*.lobf)")
        load = lambda p: _matrix_day_inputs(p, horizon)
    else:
        raise DataError("neither an events nor a features directory given")
    if n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            inputs = list(pool.map(load, paths))
    else:
        inputs = [load(p) for p in paths]
    pairs = [d.pair for d in inputs]
    if len(set(pairs)) != len(pairs):
        raise DataError("duplicate (stock, day) pairs in corpus")
    return inputs


def load_inputs(config: ExperimentConfig) -> list:
    """Load the corpus a config points at."""
    return load_days(config.events_dir, config.features_dir,
                     config.horizon, config.label_threshold,
                     n_jobs=config.n_jobs)


# -- leakage audit ----------------------------------------------------

FIT_STAGES = ("normalization", "autoencoder", "bof_codebook",
              "cv_selection", "classifier_fit")


class LeakageAudit:
    """Registry of which (stock, day) pairs fed each fitting stage.

    Pairs are recorded from the provenance of the actual rows passed
    to fit, not from the fold plan, so a selection bug upstream shows
    up here rather than being vacuously consistent.
    """

    def __init__(self):
        self.records = []

    def record(self, fold_name: str, stage: str, pairs) -> None:
        if stage not in FIT_STAGES:
            raise DataError(f"unknown fit stage {stage!r}")
        normalized = frozenset((str(s), int(d)) for s, d in pairs)
        self.records.append((fold_name, stage, normalized))

    def violations(self, plan: FoldPlan) -> list:
        allowed = {f.name: set((str(s), int(d)) for s, d in f.train_pairs)
                   for f in plan.folds}
        out = []
        for fold_name, stage, pairs in self.records:
            if fold_name not in allowed:
                out.append(f"{fold_name}: stage {stage} recorded for a fold "
                           "absent from the plan")
                continue
            bad = pairs - allowed[fold_name]
            if bad:
                out.append(f"{fold_name}: stage {stage} consumed non-training "
                           f"rows {sorted(bad)}")
        return out

    def verify(self, plan: FoldPlan) -> None:
        problems = self.violations(plan)
        if problems:
            raise DataError("leakage audit failed: " + "; ".join(problems))

    def to_records(self) -> list:
        out = []
        for fold_name, stage, pairs in sorted(
                self.records, key=lambda r: (r[0], r[1])):
            out.append({"fold": fold_name, "stage": stage,
                        "pairs": [f"{s}:{d}" for s, d in sorted(pairs)]})
        return out


# -- representation assembly ------------------------------------------

def fit_representation(parts, train_inputs, scaled_by_pair, config,
                       fold_name: str, audit: LeakageAudit, seeds: dict):
    """Fit the learned-representation components on training rows only.

    Returns (ae, bof), either of which is None when the representation
    does not use it. Fits run on a seeded subsample of the stacked
    scaled training rows, capped at ``config.fit_cap``.
    """
    need_ae = "ae" in parts
    need_bof = "bof" in parts
    if not (need_ae or need_bof):
        return None, None
    rows = np.vstack([scaled_by_pair[d.pair] for d in train_inputs])
    row_pairs = [d.pair for d in train_inputs
                 for _ in range(len(scaled_by_pair[d.pair]))]
    if len(rows) > config.fit_cap:
        rng = rng_for(config.seed, "fit_subsample", fold_name)
        idx = np.sort(rng.choice(len(rows), config.fit_cap, replace=False))
        rows = rows[idx]
        used_pairs = {row_pairs[i] for i in idx}
    else:
        used_pairs = set(row_pairs)
    ae = bof = None
    if need_ae:
        ae = Autoencoder(hidden=AE_HIDDEN, epochs=config.ae_epochs,
                         seed=seeds["ae"]).fit(rows)
        audit.record(fold_name, "autoencoder", used_pairs)
    if need_bof:
        bof = BagOfFeatures(n_codewords=config.n_codewords,
                            fuzziness=config.fuzziness,
                            seed=seeds["bof"]).fit(rows)
        audit.record(fold_name, "bof_codebook", used_pairs)
    return ae, bof


def assemble_rows(features: np.ndarray, scaler, parts, ae=None, bof=None):
    """Representation rows for every full window of one stock-day.

    Returns (X, block_index) where row i describes the window ending at
    block ``block_index[i]``, or None when the day is too short to hold
    a single window past warm-up.
    """
    if len(features) < FIRST_VALID_BLOCK + WINDOW:
        return None
    scaled = scaler.transform(features[FIRST_VALID_BLOCK:])
    cols = []
    for part in parts:
        if part == "last":
            cols.append(scaled[WINDOW - 1:])
        elif part == "mean" or part == "concat":
            cols.append(build_representation(scaled, part))
        elif part == "ae":
            cols.append(ae.transform(scaled[WINDOW - 1:]))
        elif part == "bof":
            cols.append(bof.transform(window_view(scaled)))
        else:
            raise DataError(f"unknown representation part {part!r}")
    X = cols[0] if len(cols) == 1 else np.hstack(cols)
    t = FIRST_VALID_BLOCK + WINDOW - 1 + np.arange(len(X))
    return X, t


def labeled_samples(X: np.ndarray, t: np.ndarray, labels: LabelSeries):
    """Keep the rows whose end block carries a label; returns (X, y)."""
    lo = labels.first
    hi = labels.first + len(labels.labels) - 1
    keep = (t >= lo) & (t <= hi)
    return X[keep], labels.labels[t[keep] - lo]


# -- predictor bundle -------------------------------------------------

@dataclass
class PredictorBundle:
    """Everything needed to turn a raw stock-day into predictions."""

    representation: str
    parts: tuple
    horizon: int
    threshold: float
    scaler: ZScoreScaler
    classifier: object
    ae: Autoencoder | None = None
    bof: BagOfFeatures | None = None
    smoothing: int = DEFAULT_SMOOTHING

    def day_rows(self, features: np.ndarray):
        return assemble_rows(features, self.scaler, self.parts,
                             self.ae, self.bof)

    def predict_day(self, features: np.ndarray):
        """(block_index, labels, scores) for every full window."""
        out = self.day_rows(features)
        if out is None:
            empty = np.zeros((0, 3))
            return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64), empty
        X, t = out
        return t, self.classifier.predict(X), prediction_scores(self.classifier, X)


def prediction_scores(model, X) -> np.ndarray:
    """Per-class scores, one column per class in (-1, 0, +1) order."""
    if hasattr(model, "decision_function"):
        return np.asarray(model.decision_function(X), dtype=np.float64)
    return np.asarray(model.predict_proba(X), dtype=np.float64)


def save_bundle(dirpath, bundle: PredictorBundle) -> None:
    os.makedirs(dirpath, exist_ok=True)
    model_io.save_estimator(os.path.join(dirpath, "scaler.lobm"), bundle.scaler)
    model_io.save_estimator(os.path.join(dirpath, "classifier.lobm"),
                            bundle.classifier)
    if bundle.ae is not None:
        model_io.save_estimator(os.path.join(dirpath, "autoencoder.lobm"),
                                bundle.ae)
    if bundle.bof is not None:
        model_io.save_estimator(os.path.join(dirpath, "bag_of_features.lobm"),
                                bundle.bof)
    spec = {"representation": bundle.representation,
            "parts": list(bundle.parts),
            "horizon": bundle.horizon,
            "threshold": bundle.threshold,
            "smoothing": bundle.smoothing}
    with open(os.path.join(dirpath, "predictor.json"), "w") as fh:
        json.dump(spec, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_bundle(dirpath) -> PredictorBundle:
    spec_path = os.path.join(dirpath, "predictor.json")
    try:
        with open(spec_path) as fh:
            spec = json.load(fh)
    except OSError as exc:
        raise DataError(f"cannot read predictor bundle: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DataError(f"{spec_path}: invalid JSON: {exc}") from exc
    parts = tuple(spec["parts"])
    ae = bof = None
    if "ae" in parts:
        ae = model_io.load_estimator(os.path.join(dirpath, "autoencoder.lobm"))
    if "bof" in parts:
        bof = model_io.load_estimator(
            os.path.join(dirpath, "bag_of_features.lobm"))
    return PredictorBundle(
        representation=spec["representation"],
        parts=parts,
        horizon=int(spec["horizon"]),
        threshold=float(spec["threshold"]),
        smoothing=int(spec.get("smoothing", DEFAULT_SMOOTHING)),
        scaler=model_io.load_estimator(os.path.join(dirpath, "scaler.lobm")),
        classifier=model_io.load_estimator(
            os.path.join(dirpath, "classifier.lobm")),
        ae=ae,
        bof=bof,
    )


def write_predictions(path, block_index, labels, scores) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(PREDICTIONS_HEADER + "\n")
        for t, lab, row in zip(block_index, labels, scores):
            cells = ",".join(repr(float(v)) for v in row)
            fh.write(f"{t},{lab},{cells}\n")


def evaluate_bundle(bundle: PredictorBundle, inputs,
                    predictions_dir=None) -> MetricsReport:
    """Score a saved predictor over a list of DayInputs.

    Predictions are made for every full window; only labeled blocks
    enter the metrics. With ``predictions_dir`` set, per-day prediction
    files are written as a side effect.
    """
    if predictions_dir:
        os.makedirs(predictions_dir, exist_ok=True)
    all_true, all_pred = [], []
    for day in inputs:
        t, pred, scores = bundle.predict_day(day.features)
        if predictions_dir:
            name = f"{day.stock_id}_day{day.day_id:02d}_pred.csv"
            write_predictions(os.path.join(predictions_dir, name),
                              t, pred, scores)
        if not len(t):
            continue
        series = day.labels
        lo, hi = series.first, series.first + len(series.labels) - 1
        keep = (t >= lo) & (t <= hi)
        all_true.append(series.labels[t[keep] - lo])
        all_pred.append(pred[keep])
    if not all_true:
        raise DataError("no labeled blocks in the evaluation corpus")
    return macro_scores(np.concatenate(all_true), np.concatenate(all_pred))


# -- fold execution ---------------------------------------------------

@dataclass
class FoldResult:
    fold: str
    report: MetricsReport | None = None
    error: str | None = None
    chosen_c: float | None = None
    c_table: dict | None = None
    n_train: int = 0
    n_test: int = 0
    seconds: float = 0.0


def _derived_int(root_seed: int, *names) -> int:
    return int(derive_seed(root_seed, *names).generate_state(1)[0])


def _fold_seeds(config: ExperimentConfig, fold_name: str) -> dict:
    return {"ae": _derived_int(config.seed, "ae", fold_name),
            "bof": _derived_int(config.seed, "bof", fold_name),
            "classifier": _derived_int(config.seed, "classifier", fold_name)}


def _make_classifier(config: ExperimentConfig, c_value: float, seed: int):
    if config.classifier == "svm":
        return SGDLinearSVM(C=c_value, epochs=config.epochs,
                            batch_size=config.batch_size, seed=seed)
    if config.classifier == "slfn":
        return RBFPrototypeSLFN(n_prototypes=config.n_prototypes, C=c_value,
                                epochs=config.epochs,
                                batch_size=config.batch_size, seed=seed)
    return AdamMLP(hidden=MLP_HIDDEN, epochs=config.epochs,
                   batch_size=config.batch_size, seed=seed)


def run_fold(fold, inputs_by_pair, config: ExperimentConfig,
             audit: LeakageAudit) -> tuple:
    """Execute one fold; returns (FoldResult, PredictorBundle | None)."""
    start = time.perf_counter()
    result = FoldResult(fold=fold.name)
    seeds = _fold_seeds(config, fold.name)
    train_inputs = [inputs_by_pair[(str(s), int(d))]
                    for s, d in fold.train_pairs]
    test_inputs = [inputs_by_pair[(str(s), int(d))]
                   for s, d in fold.test_pairs]

    raw_rows = [d.features[FIRST_VALID_BLOCK:] for d in train_inputs]
    scaler = ZScoreScaler().fit(np.vstack(raw_rows))
    audit.record(fold.name, "normalization", {d.pair for d in train_inputs})

    scaled_by_pair = {d.pair: scaler.transform(d.features[FIRST_VALID_BLOCK:])
                      for d in train_inputs}
    ae, bof = fit_representation(config.parts, train_inputs, scaled_by_pair,
                                 config, fold.name, audit, seeds)
    del scaled_by_pair

    X_parts, y_parts, pair_sizes = [], [], []
    for day in train_inputs:
        out = assemble_rows(day.features, scaler, config.parts, ae, bof)
        if out is None:
            continue
        Xd, yd = labeled_samples(out[0], out[1], day.labels)
        if len(Xd):
            X_parts.append(Xd)
            y_parts.append(yd)
            pair_sizes.append((day.pair, len(Xd)))
    if not X_parts:
        raise DataError(f"fold {fold.name}: no labeled training samples")
    X_train = np.vstack(X_parts)
    y_train = np.concatenate(y_parts)
    del X_parts, y_parts
    train_pairs_used = {p for p, _ in pair_sizes}
    result.n_train = len(X_train)

    c_value = config.fixed_c
    if config.select_c and config.classifier in ("svm", "slfn"):
        make = lambda c: _make_classifier(config, c, seeds["classifier"])
        c_value, table = select_regularizer(make, X_train, y_train)
        audit.record(fold.name, "cv_selection", train_pairs_used)
        result.chosen_c = c_value
        result.c_table = {repr(float(k)): v for k, v in sorted(table.items())}

    clf = _make_classifier(config, c_value, seeds["classifier"])
    clf.fit(X_train, y_train)
    audit.record(fold.name, "classifier_fit", train_pairs_used)
    del X_train, y_train

    bundle = PredictorBundle(
        representation=config.representation, parts=config.parts,
        horizon=config.horizon, threshold=config.label_threshold,
        scaler=scaler, classifier=clf, ae=ae, bof=bof)

    report = evaluate_bundle(bundle, test_inputs)
    result.report = MetricsReport(
        confusion=report.confusion, class_precision=report.class_precision,
        class_recall=report.class_recall, class_f=report.class_f,
        precision=report.precision, recall=report.recall,
        f_score=report.f_score, fold=fold.name)
    result.n_test = int(report.confusion.sum())
    result.seconds = time.perf_counter() - start
    return result, bundle


# -- results table ----------------------------------------------------

def results_rows(config: ExperimentConfig, fold_results) -> list:
    rows = []
    for fr in fold_results:
        if fr.report is None:
            continue
        rows.append({
            "protocol": config.protocol,
            "horizon": config.horizon,
            "representation": config.representation,
            "classifier": config.classifier,
            "fold": fr.fold,
            "macro_precision": fr.report.precision,
            "macro_recall": fr.report.recall,
            "macro_f": fr.report.f_score,
        })
    return rows


def write_results(path, rows) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(RESULTS_HEADER + "\n")
        for r in rows:
            fh.write(f"{r['protocol']},{r['horizon']},{r['representation']},"
                     f"{r['classifier']},{r['fold']},"
                     f"{float(r['macro_precision'])!r},"
                     f"{float(r['macro_recall'])!r},"
                     f"{float(r['macro_f'])!r}\n")


def read_results(path) -> list:
    rows = []
    with open(path) as fh:
        header = fh.readline().strip()
        if header != RESULTS_HEADER:
            raise DataError(f"{path}: bad results header {header!r}")
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 8:
                raise DataError(f"{path}:{lineno}: expected 8 fields")
            rows.append({
                "protocol": parts[0],
                "horizon": int(parts[1]),
                "representation": parts[2],
                "classifier": parts[3],
                "fold": parts[4],
                "macro_precision": float(parts[5]),
                "macro_recall": float(parts[6]),
                "macro_f": float(parts[7]),
            })
    return rows


def summarize_results(rows) -> list:
    """Per-method mean and sample standard deviation over folds.

    Methods are (protocol, horizon, representation, classifier) groups;
    a single-fold group reports a deviation of 0.
    """
    groups = {}
    for r in rows:
        key = (r["protocol"], r["horizon"], r["representation"],
               r["classifier"])
        groups.setdefault(key, []).append(r)
    out = []
    for key in sorted(groups, key=lambda k: tuple(str(x) for x in k)):
        rs = groups[key]
        summary = {"protocol": key[0], "horizon": key[1],
                   "representation": key[2], "classifier": key[3],
                   "n_folds": len(rs)}
        for metric in ("macro_precision", "macro_recall", "macro_f"):
            vals = np.array([r[metric] for r in rs], dtype=np.float64)
            summary[f"{metric}_mean"] = float(vals.mean())
            summary[f"{metric}_std"] = (float(vals.std(ddof=1))
                                        if len(vals) > 1 else 0.0)
        out.append(summary)
    return out


def format_summary(summaries) -> str:
    lines = ["protocol         horizon representation classifier  folds  "
             "macro_p             macro_r             macro_f"]
    for s in summaries:
        cells = []
        for metric in ("macro_precision", "macro_recall", "macro_f"):
            cells.append(f"{s[f'{metric}_mean']:.2f} +/- "
                         f"{s[f'{metric}_std']:.2f}")
        lines.append(f"{s['protocol']:<16} {s['horizon']:>7} "
                     f"{s['representation']:<14} {s['classifier']:<10} "
                     f"{s['n_folds']:>5}  {cells[0]:<19} {cells[1]:<19} "
                     f"{cells[2]}")
    return "\n".join(lines)


def method_score_matrix(rows, metric: str = "macro_f"):
    """Method-by-dataset score matrix for rank statistics.

    Methods (rows) are the distinct (representation, classifier) pairs;
    datasets (columns) are the distinct (protocol, horizon, fold)
    triples. Every method must cover every dataset. The orientation
    matches what the rank tests expect.
    """
    methods = sorted({(r["representation"], r["classifier"]) for r in rows})
    datasets = sorted({(r["protocol"], r["horizon"], r["fold"])
                       for r in rows})
    if len(methods) < 2:
        raise DataError("rank statistics need at least 2 methods")
    cells = {}
    for r in rows:
        key = ((r["representation"], r["classifier"]),
               (r["protocol"], r["horizon"], r["fold"]))
        if key in cells:
            raise DataError(f"duplicate result row for {key}")
        cells[key] = r[metric]
    scores = np.empty((len(methods), len(datasets)))
    for j, m in enumerate(methods):
        for i, ds in enumerate(datasets):
            if (m, ds) not in cells:
                raise DataError(f"method {m} has no row for dataset {ds}")
            scores[j, i] = cells[(m, ds)]
    names = ["+".join(m) for m in methods]
    return scores, names, datasets


# -- run orchestration ------------------------------------------------

@dataclass
class RunResult:
    config: ExperimentConfig
    plan: FoldPlan
    fold_results: list
    rows: list
    out_dir: str
    results_path: str
    manifest_path: str
    models_dir: str
    manifest: dict = field(default_factory=dict)


def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _versions() -> dict:
    import scipy
    import sklearn
    return {"package": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "scikit_learn": sklearn.__version__,
            "python": sys.version.split()[0]}


def run_experiment(config: ExperimentConfig, log=None) -> RunResult:
    """Run the configured experiment end to end.

    Writes ``results.csv``, one predictor bundle per fold under
    ``models/``, and ``manifest.json`` into ``config.out_dir``. A fold
    whose stage fails is recorded as failed and skipped; the remaining
    folds still run.
    """
    if not config.out_dir:
        raise DataError("config.out_dir is required to run an experiment")
    started = time.perf_counter()
    os.makedirs(config.out_dir, exist_ok=True)
    models_dir = os.path.join(config.out_dir, "models")
    os.makedirs(models_dir, exist_ok=True)

    inputs = load_inputs(config)
    inputs_by_pair = {d.pair: d for d in inputs}
    plan = make_fold_plan(config.protocol, list(inputs_by_pair))
    check_fold_isolation(plan)
    audit = LeakageAudit()

    def one_fold(fold):
        try:
            result, bundle = run_fold(fold, inputs_by_pair, config, audit)
        except Exception as exc:  # noqa: BLE001 - fold isolation barrier
            if log:
                log(f"fold {fold.name}: failed: {exc}")
            return FoldResult(fold=fold.name,
                              error=f"{type(exc).__name__}: {exc}"), None
        if log:
            log(f"fold {fold.name}: macro F {result.report.f_score:.2f} "
                f"({result.n_train} train / {result.n_test} test rows, "
                f"{result.seconds:.1f}s)")
        return result, bundle

    if config.n_jobs > 1:
        with ThreadPoolExecutor(max_workers=config.n_jobs) as pool:
            outcomes = list(pool.map(one_fold, plan.folds))
    else:
        outcomes = [one_fold(f) for f in plan.folds]

    fold_results = []
    for fold, (result, bundle) in zip(plan.folds, outcomes):
        fold_results.append(result)
        if bundle is not None:
            save_bundle(os.path.join(models_dir, fold.name), bundle)

    audit.verify(plan)

    rows = results_rows(config, fold_results)
    results_path = os.path.join(config.out_dir, "results.csv")
    write_results(results_path, rows)

    model_hashes = {}
    for root, _, files in os.walk(models_dir):
        for name in sorted(files):
            full = os.path.join(root, name)
            rel = os.path.relpath(full, models_dir)
            model_hashes[rel] = _sha256(full)

    manifest = {
        "config": config.to_dict(),
        "versions": _versions(),
        "seeds": {
            "root": config.seed,
            "folds": {f.name: _fold_seeds(config, f.name)
                      for f in plan.folds},
        },
        "corpus": {
            "n_stock_days": len(inputs),
            "n_blocks": int(sum(len(d.features) for d in inputs)),
            "pairs": [[s, d] for s, d in sorted(inputs_by_pair)],
        },
        "representation_dim": config.input_dim,
        "leakage_audit": {"status": "passed",
                          "records": audit.to_records()},
        "folds": [{
            "name": fr.fold,
            "status": "ok" if fr.report is not None else "failed",
            "error": fr.error,
            "n_train": fr.n_train,
            "n_test": fr.n_test,
            "chosen_c": fr.chosen_c,
            "c_table": fr.c_table,
            "macro_f": None if fr.report is None else fr.report.f_score,
            "seconds": round(fr.seconds, 3),
        } for fr in fold_results],
        "outputs": {
            "results_csv": {"path": "results.csv",
                            "sha256": _sha256(results_path)},
            "models": model_hashes,
        },
        "elapsed_seconds": round(time.perf_counter() - started, 3),
    }
    manifest_path = os.path.join(config.out_dir, "manifest.json")
    with open(manifest_path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")

    return RunResult(config=config, plan=plan, fold_results=fold_results,
                     rows=rows, out_dir=config.out_dir,
                     results_path=results_path, manifest_path=manifest_path,
                     models_dir=models_dir, manifest=manifest)


@dataclass
class ReplayReport:
    match: bool
    mismatches: list
    out_dir: str


def replay_manifest(manifest_path, out_dir, log=None) -> ReplayReport:
    """Rerun a manifest's config and verify outputs hash-identically.

    The replay writes into ``out_dir`` and compares the new results
    table and model artifacts against the hashes the original run
    recorded in its manifest.
    """
    try:
        with open(manifest_path) as fh:
            manifest = json.load(fh)
    except OSError as exc:
        raise DataError(f"cannot read manifest: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DataError(f"{manifest_path}: invalid JSON: {exc}") from exc
    if "config" not in manifest or "outputs" not in manifest:
        raise DataError(f"{manifest_path}: not a run manifest")
    config = from_dict({**manifest["config"], "out_dir": str(out_dir)})
    rerun = run_experiment(config, log=log)

    mismatches = []
    want = manifest["outputs"]["results_csv"]["sha256"]
    got = rerun.manifest["outputs"]["results_csv"]["sha256"]
    if want != got:
        mismatches.append("results.csv")
    old_models = manifest["outputs"]["models"]
    new_models = rerun.manifest["outputs"]["models"]
    for rel in sorted(set(old_models) | set(new_models)):
        if old_models.get(rel) != new_models.get(rel):
            mismatches.append(f"models/{rel}")
    return ReplayReport(match=not mismatches, mismatches=mismatches,
                        out_dir=str(out_dir))


# -- ingestion --------------------------------------------------------

@dataclass
class IngestSummary:
    store_dir: str
    files: list = field(default_factory=list)

    @property
    def total_malformed(self) -> int:
        return sum(f.get("malformed", 0) for f in self.files)


def ingest(paths, store_dir) -> IngestSummary:
    """Validate external files into the internal store layout.

    Event files (*.csv plus sidecar) are parsed, malformed rows dropped
    and counted, and the surviving stream rewritten canonically under
    ``store/events``. Feature matrices (*.lobf, with index sidecars
    when present) round-trip bit-exactly under ``store/features``.
    """
    from .book.events import write_events
    from .features.matrix_io import write_matrix

    summary = IngestSummary(store_dir=str(store_dir))
    events_dir = os.path.join(store_dir, "events")
    features_dir = os.path.join(store_dir, "features")
    for path in paths:
        if path.endswith(".lobf"):
            os.makedirs(features_dir, exist_ok=True)
            X, index = read_matrix(path)
            out = os.path.join(features_dir, os.path.basename(path))
            write_matrix(out, np.asarray(X), index)
            summary.files.append({"path": str(path), "kind": "matrix",
                                  "rows": int(X.shape[0]),
                                  "cols": int(X.shape[1]), "out": out})
        elif path.endswith(".csv"):
            os.makedirs(events_dir, exist_ok=True)
            meta = read_meta(path)
            events, report = read_events(path)
            out = os.path.join(events_dir, os.path.basename(path))
            write_events(out, events, meta)
            summary.files.append({"path": str(path), "kind": "events",
                                  "accepted": report.accepted,
                                  "malformed": report.malformed, "out": out})
        else:
            raise DataError(f"{path}: expected an event file (*.csv) or a "
                            "feature matrix (*.lobf)")
    return summary


# -- prediction benchmark ---------------------------------------------

@dataclass
class BenchmarkReport:
    n_single: int
    mean_latency_ms: float
    median_latency_ms: float
    batch_rows: int
    batch_seconds: float
    throughput_rows_per_s: float

    def to_dict(self) -> dict:
        return {"n_single": self.n_single,
                "mean_latency_ms": self.mean_latency_ms,
                "median_latency_ms": self.median_latency_ms,
                "batch_rows": self.batch_rows,
                "batch_seconds": self.batch_seconds,
                "throughput_rows_per_s": self.throughput_rows_per_s}


def benchmark_predict(model, X, n_single: int = 1000) -> BenchmarkReport:
    """Time single-row predictions and one full-batch prediction.

    Latency is the mean and median over ``n_single`` one-row predict
    calls; throughput divides the row count of one batched predict call
    by its wall time.
    """
    X = check_matrix(X)
    if len(X) < n_single:
        raise DataError(f"benchmark needs >= {n_single} rows, got {len(X)}")
    for _ in range(3):
        model.predict(X[:1])
    lat = np.empty(n_single)
    for i in range(n_single):
        row = X[i: i + 1]
        t0 = time.perf_counter()
        model.predict(row)
        lat[i] = time.perf_counter() - t0
    t0 = time.perf_counter()
    model.predict(X)
    batch_seconds = time.perf_counter() - t0
    return BenchmarkReport(
        n_single=n_single,
        mean_latency_ms=float(lat.mean() * 1000.0),
        median_latency_ms=float(np.median(lat) * 1000.0),
        batch_rows=len(X),
        batch_seconds=float(batch_seconds),
        throughput_rows_per_s=float(len(X) / batch_seconds),
    )
