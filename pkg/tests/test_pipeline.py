"""End-to-end orchestration: corpus loading, folds, artifacts, audit."""

import json
import os

import numpy as np
import pytest

from lobcast import pipeline
from lobcast.config import ExperimentConfig, REP_DIMS, from_dict
from lobcast.errors import DataError
from lobcast.eval.folds import make_fold_plan
from lobcast.features.extract import FIRST_VALID_BLOCK
from lobcast.features.matrix_io import RowIndex, write_matrix
from lobcast.features.scaler import ZScoreScaler
from lobcast.features.windows import WINDOW
from lobcast.labeling import (HORIZON_THRESHOLDS, LabelParams, label_series,
                              write_label_file)
from lobcast.repr_learning import Autoencoder, BagOfFeatures
from lobcast.synth import MarketConfig, generate_corpus


@pytest.fixture(scope="module")
def corpus(tmp_path_factory):
    root = tmp_path_factory.mktemp("events")
    generate_corpus(MarketConfig(stocks=2, days=3, events_per_day=4000,
                                 seed=3), root)
    return str(root)


@pytest.fixture(scope="module")
def inputs(corpus):
    return pipeline.load_days(events_dir=corpus, horizon=1,
                              threshold=HORIZON_THRESHOLDS[1])


def small_config(corpus, out_dir, **overrides):
    base = dict(events_dir=str(corpus), out_dir=str(out_dir), horizon=1,
                representation="last", classifier="svm", select_c=False,
                seed=7)
    base.update(overrides)
    return from_dict(base)


# -- corpus loading ---------------------------------------------------

def test_load_days_shapes(inputs):
    assert len(inputs) == 6
    pairs = [d.pair for d in inputs]
    assert pairs == sorted(pairs)
    for d in inputs:
        assert d.features.shape[1] == 144
        assert np.isnan(d.features[:FIRST_VALID_BLOCK]).all()
        assert np.isfinite(d.features[FIRST_VALID_BLOCK:]).all()
        assert d.labels.first == 8
        assert len(d.labels.labels) == len(d.features) - 8 - 1


def test_load_days_parallel_matches(corpus, inputs):
    par = pipeline.load_days(events_dir=corpus, horizon=1,
                             threshold=HORIZON_THRESHOLDS[1], n_jobs=3)
    assert [d.pair for d in par] == [d.pair for d in inputs]
    for a, b in zip(par, inputs):
        np.testing.assert_array_equal(a.features, b.features)
        np.testing.assert_array_equal(a.labels.labels, b.labels.labels)


def test_load_days_needs_a_source():
    with pytest.raises(DataError):
        pipeline.load_days()


def test_load_days_empty_dir(tmp_path):
    with pytest.raises(DataError, match="no event files"):
        pipeline.load_days(events_dir=str(tmp_path))


def _write_matrix_day(dirpath, day, horizon):
    n = len(day.features)
    index = RowIndex(
        stock_id=np.array([day.stock_id] * n, dtype=object),
        day_id=np.full(n, day.day_id, dtype=np.int64),
        timestamp=np.arange(n, dtype=np.int64),
        block_index=np.arange(n, dtype=np.int64),
    )
    stem = os.path.join(str(dirpath), f"{day.stock_id}_day{day.day_id:02d}")
    write_matrix(stem + ".lobf", day.features, index)
    write_label_file(f"{stem}_h{horizon}.labels", day.labels)


def test_matrix_corpus_roundtrip(tmp_path, inputs):
    for day in inputs:
        _write_matrix_day(tmp_path, day, horizon=1)
    loaded = pipeline.load_days(features_dir=str(tmp_path), horizon=1)
    assert [d.pair for d in loaded] == [d.pair for d in inputs]
    for a, b in zip(loaded, inputs):
        np.testing.assert_array_equal(a.features, b.features)
        np.testing.assert_array_equal(a.labels.labels, b.labels.labels)
        assert a.labels.first == b.labels.first


def test_matrix_corpus_missing_sidecars(tmp_path, inputs):
    day = inputs[0]
    path = os.path.join(str(tmp_path), "solo.lobf")
    write_matrix(path, day.features)  # no index
    with pytest.raises(DataError, match="index"):
        pipeline.load_days(features_dir=str(tmp_path), horizon=1)
    os.remove(path)
    _write_matrix_day(tmp_path, day, horizon=5)
    with pytest.raises(DataError, match="label file"):
        pipeline.load_days(features_dir=str(tmp_path), horizon=1)


# -- representation assembly ------------------------------------------

@pytest.fixture(scope="module")
def fitted_parts(inputs):
    scaler = ZScoreScaler().fit(
        np.vstack([d.features[FIRST_VALID_BLOCK:] for d in inputs[:2]]))
    rows = scaler.transform(inputs[0].features[FIRST_VALID_BLOCK:])
    ae = Autoencoder(epochs=2, seed=0).fit(rows)
    bof = BagOfFeatures(n_codewords=16, seed=0).fit(rows)
    return scaler, ae, bof


@pytest.mark.parametrize("kind,parts", [
    ("last", ("last",)), ("mean", ("mean",)),
    ("last_mean", ("last", "mean")), ("concat", ("concat",)),
    ("ae", ("ae",)), ("bof", ("bof",)),
    ("ae_bof", ("ae", "bof")), ("last_bof", ("last", "bof")),
])
def test_assemble_rows_dims(inputs, fitted_parts, kind, parts):
    scaler, ae, bof = fitted_parts
    day = inputs[0]
    X, t = pipeline.assemble_rows(day.features, scaler, parts, ae, bof)
    expected_dim = REP_DIMS[kind] if kind != "bof" else 16
    if kind == "ae_bof":
        expected_dim = 24 + 16
    if kind == "last_bof":
        expected_dim = 144 + 16
    assert X.shape == (len(day.features) - FIRST_VALID_BLOCK - WINDOW + 1,
                       expected_dim)
    assert t[0] == FIRST_VALID_BLOCK + WINDOW - 1
    assert t[-1] == len(day.features) - 1


def test_assemble_rows_last_alignment(inputs, fitted_parts):
    scaler, _, _ = fitted_parts
    day = inputs[0]
    X, t = pipeline.assemble_rows(day.features, scaler, ("last",))
    scaled = scaler.transform(day.features[FIRST_VALID_BLOCK:])
    np.testing.assert_array_equal(X[0], scaled[WINDOW - 1])
    np.testing.assert_array_equal(X[-1], scaled[-1])


def test_assemble_rows_short_day(fitted_parts):
    scaler, _, _ = fitted_parts
    too_short = np.zeros((FIRST_VALID_BLOCK + WINDOW - 1, 144))
    assert pipeline.assemble_rows(too_short, scaler, ("last",)) is None


def test_labeled_samples_alignment(inputs, fitted_parts):
    scaler, _, _ = fitted_parts
    day = inputs[0]
    X, t = pipeline.assemble_rows(day.features, scaler, ("last",))
    Xl, y = pipeline.labeled_samples(X, t, day.labels)
    # horizon 1: labels stop at block n-2, so exactly one row drops off
    assert len(Xl) == len(X) - 1
    series = day.labels
    np.testing.assert_array_equal(
        y, series.labels[t[:-1] - series.first])


# -- leakage audit ----------------------------------------------------

def test_audit_passes_on_training_pairs(inputs):
    plan = make_fold_plan("anchored_walk_forward", [d.pair for d in inputs])
    audit = pipeline.LeakageAudit()
    fold = plan.folds[0]
    audit.record(fold.name, "normalization", fold.train_pairs)
    audit.record(fold.name, "classifier_fit", fold.train_pairs)
    assert audit.violations(plan) == []
    audit.verify(plan)


def test_audit_flags_test_pair(inputs):
    plan = make_fold_plan("anchored_walk_forward", [d.pair for d in inputs])
    fold = plan.folds[0]
    audit = pipeline.LeakageAudit()
    leaked = fold.train_pairs + (fold.test_pairs[0],)
    audit.record(fold.name, "normalization", leaked)
    problems = audit.violations(plan)
    assert len(problems) == 1
    assert "normalization" in problems[0]
    with pytest.raises(DataError, match="leakage"):
        audit.verify(plan)


def test_audit_rejects_unknown_stage():
    audit = pipeline.LeakageAudit()
    with pytest.raises(DataError):
        audit.record("day1", "mystery", [("S", 0)])


def test_audit_flags_unknown_fold(inputs):
    plan = make_fold_plan("anchored_walk_forward", [d.pair for d in inputs])
    audit = pipeline.LeakageAudit()
    audit.record("nosuchfold", "normalization", [inputs[0].pair])
    assert any("absent" in p for p in audit.violations(plan))


# -- run_experiment ----------------------------------------------------

@pytest.fixture(scope="module")
def svm_run(corpus, tmp_path_factory):
    out = tmp_path_factory.mktemp("run_svm")
    return pipeline.run_experiment(small_config(corpus, out))


def test_run_shape(svm_run):
    assert len(svm_run.plan.folds) == 2
    assert len(svm_run.rows) == 2
    assert [fr.error for fr in svm_run.fold_results] == [None, None]
    assert os.path.exists(svm_run.results_path)
    assert os.path.exists(svm_run.manifest_path)
    for fold in ("day1", "day2"):
        d = os.path.join(svm_run.models_dir, fold)
        for name in ("predictor.json", "scaler.lobm", "classifier.lobm"):
            assert os.path.exists(os.path.join(d, name))


def test_run_results_file(svm_run):
    rows = pipeline.read_results(svm_run.results_path)
    assert rows == svm_run.rows
    with open(svm_run.results_path) as fh:
        assert fh.readline().strip() == pipeline.RESULTS_HEADER


def test_run_manifest(svm_run):
    with open(svm_run.manifest_path) as fh:
        manifest = json.load(fh)
    assert manifest["leakage_audit"]["status"] == "passed"
    assert manifest["representation_dim"] == 144
    assert manifest["corpus"]["n_stock_days"] == 6
    assert {f["status"] for f in manifest["folds"]} == {"ok"}
    # the stored config reproduces the run config exactly
    assert from_dict(manifest["config"]) == svm_run.config
    assert set(manifest["seeds"]["folds"]) == {"day1", "day2"}


def test_run_is_deterministic(corpus, tmp_path, svm_run):
    again = pipeline.run_experiment(small_config(corpus, tmp_path / "b"))
    with open(svm_run.results_path, "rb") as fh:
        first = fh.read()
    with open(again.results_path, "rb") as fh:
        assert fh.read() == first
    for fold in ("day1", "day2"):
        for name in ("predictor.json", "scaler.lobm", "classifier.lobm"):
            a = os.path.join(svm_run.models_dir, fold, name)
            b = os.path.join(again.models_dir, fold, name)
            with open(a, "rb") as fa, open(b, "rb") as fb:
                assert fa.read() == fb.read(), f"{fold}/{name} differs"


def test_saved_bundle_predicts(svm_run, inputs):
    bundle = pipeline.load_bundle(os.path.join(svm_run.models_dir, "day2"))
    assert bundle.representation == "last"
    assert bundle.horizon == 1
    day = inputs[-1]
    t, labels, scores = bundle.predict_day(day.features)
    assert len(t) == len(labels) == len(scores)
    assert scores.shape[1] == 3
    assert set(np.unique(labels)) <= {-1, 0, 1}
    # scores argmax must agree with the predicted label
    picked = np.array([-1, 0, 1])[np.argmax(scores, axis=1)]
    np.testing.assert_array_equal(picked, labels)


def test_replay_matches(svm_run, tmp_path):
    report = pipeline.replay_manifest(svm_run.manifest_path,
                                      tmp_path / "replay")
    assert report.match
    assert report.mismatches == []


def test_replay_detects_tamper(svm_run, tmp_path):
    with open(svm_run.manifest_path) as fh:
        manifest = json.load(fh)
    manifest["outputs"]["results_csv"]["sha256"] = "0" * 64
    doctored = tmp_path / "doctored.json"
    with open(doctored, "w") as fh:
        json.dump(manifest, fh)
    report = pipeline.replay_manifest(str(doctored), tmp_path / "replay2")
    assert not report.match
    assert "results.csv" in report.mismatches


def test_failed_fold_is_isolated(tmp_path):
    # one stock, tiny days: fold day1 trains on ~77 rows, day2 on
    # ~154, so a 100-prototype hidden layer fits only the second fold
    events = tmp_path / "ev"
    generate_corpus(MarketConfig(stocks=1, days=3, events_per_day=2000,
                                 seed=11), events)
    config = small_config(events, tmp_path / "out", classifier="slfn",
                          n_prototypes=100, epochs=3)
    result = pipeline.run_experiment(config)
    by_name = {fr.fold: fr for fr in result.fold_results}
    assert by_name["day1"].error is not None
    assert by_name["day1"].report is None
    assert by_name["day2"].error is None
    assert len(result.rows) == 1
    with open(result.manifest_path) as fh:
        manifest = json.load(fh)
    statuses = {f["name"]: f["status"] for f in manifest["folds"]}
    assert statuses == {"day1": "failed", "day2": "ok"}
    assert not os.path.exists(os.path.join(result.models_dir, "day1"))


def test_holdout_protocol_runs(corpus, tmp_path):
    config = small_config(corpus, tmp_path, protocol="holdout_per_stock")
    result = pipeline.run_experiment(config)
    assert len(result.rows) == 2
    assert sorted(r["fold"] for r in result.rows) == ["stock_SYN00",
                                                      "stock_SYN01"]


def test_cv_selection_recorded(corpus, tmp_path):
    config = small_config(corpus, tmp_path, select_c=True, epochs=5)
    result = pipeline.run_experiment(config)
    for fr in result.fold_results:
        assert fr.error is None
        assert fr.chosen_c is not None
        assert len(fr.c_table) == 5


def test_run_requires_out_dir(corpus):
    with pytest.raises(DataError, match="out_dir"):
        pipeline.run_experiment(small_config(corpus, ""))


# -- results utilities ------------------------------------------------

def _fake_rows():
    rows = []
    for fold, f1, f2 in (("day1", 40.0, 50.0), ("day2", 44.0, 46.0)):
        for method, f in (("svm", f1), ("mlp", f2)):
            rows.append({"protocol": "anchored_walk_forward", "horizon": 10,
                         "representation": "concat", "classifier": method,
                         "fold": fold, "macro_precision": f,
                         "macro_recall": f, "macro_f": f})
    return rows


def test_results_roundtrip(tmp_path, svm_run):
    path = str(tmp_path / "results.csv")
    pipeline.write_results(path, svm_run.rows)
    assert pipeline.read_results(path) == svm_run.rows


def test_summarize_results():
    summaries = pipeline.summarize_results(_fake_rows())
    assert len(summaries) == 2
    by_clf = {s["classifier"]: s for s in summaries}
    assert by_clf["svm"]["macro_f_mean"] == pytest.approx(42.0)
    # sample standard deviation, not population
    assert by_clf["svm"]["macro_f_std"] == pytest.approx(
        np.std([40.0, 44.0], ddof=1))
    assert by_clf["mlp"]["n_folds"] == 2
    text = pipeline.format_summary(summaries)
    assert "svm" in text and "+/-" in text


def test_summary_single_fold_has_zero_std():
    rows = _fake_rows()[:1]
    s = pipeline.summarize_results(rows)[0]
    assert s["macro_f_std"] == 0.0


def test_method_score_matrix():
    scores, names, datasets = pipeline.method_score_matrix(_fake_rows())
    assert names == ["concat+mlp", "concat+svm"]
    assert len(datasets) == 2
    np.testing.assert_allclose(scores, [[50.0, 46.0], [40.0, 44.0]])


def test_method_score_matrix_rejects_gaps():
    rows = _fake_rows()[:-1]
    with pytest.raises(DataError, match="no row"):
        pipeline.method_score_matrix(rows)
    with pytest.raises(DataError, match="at least 2"):
        pipeline.method_score_matrix([r for r in _fake_rows()
                                      if r["classifier"] == "svm"])


# -- ingest -----------------------------------------------------------

def test_ingest_events_and_matrix(tmp_path, corpus, inputs):
    src = sorted(os.path.join(corpus, p) for p in os.listdir(corpus)
                 if p.endswith(".csv"))[0]
    mat = str(tmp_path / "m.lobf")
    day = inputs[0]
    write_matrix(mat, day.features[FIRST_VALID_BLOCK:])
    store = str(tmp_path / "store")
    summary = pipeline.ingest([src, mat], store)
    kinds = [f["kind"] for f in summary.files]
    assert kinds == ["events", "matrix"]
    assert summary.files[0]["malformed"] == 0
    assert summary.total_malformed == 0
    out_mat = summary.files[1]["out"]
    with open(mat, "rb") as fa, open(out_mat, "rb") as fb:
        assert fa.read() == fb.read()


def test_ingest_counts_malformed(tmp_path):
    path = str(tmp_path / "bad.csv")
    with open(path, "w") as fh:
        fh.write("timestamp,kind,side,price_ticks,volume,order_ref\n")
        fh.write("100,S,B,2000,5,1\n")
        fh.write("101,Q,B,2000,5,2\n")       # unknown kind
        fh.write("102,S,B,2000,notanint,3\n")  # bad volume
    with open(path + ".meta", "w") as fh:
        fh.write("stock_id=X\nday_id=0\ntick_size=0.01\n")
    summary = pipeline.ingest([path], str(tmp_path / "store"))
    assert summary.files[0]["accepted"] == 1
    assert summary.files[0]["malformed"] == 2


def test_ingest_rejects_unknown_extension(tmp_path):
    path = str(tmp_path / "notes.txt")
    with open(path, "w") as fh:
        fh.write("hi\n")
    with pytest.raises(DataError):
        pipeline.ingest([path], str(tmp_path / "store"))


# -- prediction utilities ---------------------------------------------

def test_prediction_scores_shapes(svm_run, inputs):
    bundle = pipeline.load_bundle(os.path.join(svm_run.models_dir, "day1"))
    X, _ = bundle.day_rows(inputs[0].features)
    scores = pipeline.prediction_scores(bundle.classifier, X)
    np.testing.assert_array_equal(
        scores, bundle.classifier.decision_function(X))


def test_write_predictions_format(tmp_path):
    path = str(tmp_path / "pred.csv")
    t = np.array([53, 54])
    labels = np.array([1, -1])
    scores = np.array([[0.25, -0.5, 1.0], [0.75, 0.0, -1.0]])
    pipeline.write_predictions(path, t, labels, scores)
    with open(path) as fh:
        lines = fh.read().splitlines()
    assert lines[0] == "block_index,label,score_-1,score_0,score_+1"
    assert lines[1] == "53,1,0.25,-0.5,1.0"
    assert len(lines) == 3


def test_benchmark_predict(svm_run, inputs):
    bundle = pipeline.load_bundle(os.path.join(svm_run.models_dir, "day2"))
    rows = [bundle.day_rows(d.features)[0] for d in inputs]
    X = np.vstack(rows)
    report = pipeline.benchmark_predict(bundle.classifier, X, n_single=50)
    assert report.n_single == 50
    assert report.mean_latency_ms > 0
    assert report.median_latency_ms > 0
    assert report.throughput_rows_per_s > 0
    assert report.batch_rows == len(X)
    assert set(report.to_dict()) == {
        "n_single", "mean_latency_ms", "median_latency_ms", "batch_rows",
        "batch_seconds", "throughput_rows_per_s"}


def test_benchmark_needs_enough_rows(svm_run):
    bundle = pipeline.load_bundle(os.path.join(svm_run.models_dir, "day1"))
    with pytest.raises(DataError, match="rows"):
        pipeline.benchmark_predict(bundle.classifier, np.zeros((10, 144)))
