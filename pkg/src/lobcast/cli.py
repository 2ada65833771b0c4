"""Command-line surface for the forecasting toolkit.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric failure.
Every experiment setting can come from a JSON config file, a command
line flag, or both; flags win.
"""

import argparse
import glob
import json
import os
import sys
import time

import numpy as np

from . import config as config_mod
from . import pipeline
from .book.blocks import replay_day
from .book.events import read_events, read_meta
from .errors import DataError, NumericError
from .eval.stats import friedman_test, nemenyi_cd, nemenyi_compare
from .features.extract import day_feature_matrix
from .features.matrix_io import RowIndex, write_matrix
from .labeling import HORIZON_THRESHOLDS, LabelParams, label_series, write_label_file
from .synth import REGIMES, MarketConfig, generate_corpus

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    """argparse that reports usage problems as exceptions.

    The default parser calls sys.exit(2); 2 is taken by data errors
    here, so usage faults are rerouted to exit code 1.
    """

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _corpus_paths(events_dir: str) -> list:
    paths = sorted(glob.glob(os.path.join(events_dir, "*.csv")))
    if not paths:
        raise DataError(f"{events_dir}: no event files (*.csv)")
    return paths


# -- subcommand implementations ---------------------------------------

def cmd_synth(args) -> int:
    mc = MarketConfig(stocks=args.stocks, days=args.days,
                      events_per_day=args.events_per_day,
                      tick_size=args.tick_size, base_price=args.base_price,
                      drift=args.drift, noise=args.noise,
                      regime=args.regime, seed=args.seed)
    manifest = generate_corpus(mc, args.out_dir)
    blocks = sum(f["blocks"] for f in manifest["files"])
    print(f"wrote {len(manifest['files'])} stock-days, {blocks} blocks "
          f"-> {args.out_dir}")
    for h, counts in sorted(manifest["label_totals"].items()):
        print(f"  horizon {h}: down {counts['-1']}  flat {counts['0']}  "
              f"up {counts['1']}")
    return EXIT_OK


def cmd_ingest(args) -> int:
    summary = pipeline.ingest(args.paths, args.store_dir)
    for f in summary.files:
        if f["kind"] == "events":
            print(f"{f['path']}: {f['accepted']} rows accepted, "
                  f"{f['malformed']} malformed -> {f['out']}")
        else:
            print(f"{f['path']}: {f['rows']}x{f['cols']} matrix -> {f['out']}")
    return EXIT_OK


def cmd_features(args) -> int:
    os.makedirs(args.out_dir, exist_ok=True)
    total = 0
    for path in _corpus_paths(args.events_dir):
        meta = read_meta(path)
        events, _ = read_events(path)
        day = replay_day(events, meta)
        X = day_feature_matrix(day)
        n = len(X)
        index = RowIndex(
            stock_id=np.array([meta.stock_id] * n, dtype=object),
            day_id=np.full(n, meta.day_id, dtype=np.int64),
            timestamp=day.ts.astype(np.int64),
            block_index=np.arange(n, dtype=np.int64),
        )
        stem = os.path.splitext(os.path.basename(path))[0]
        out = os.path.join(args.out_dir, stem + ".lobf")
        write_matrix(out, X, index)
        total += n
        print(f"{path}: {n} blocks -> {out}")
    print(f"total {total} blocks")
    return EXIT_OK


def cmd_labels(args) -> int:
    os.makedirs(args.out_dir, exist_ok=True)
    horizons = args.horizon or sorted(HORIZON_THRESHOLDS)
    for path in _corpus_paths(args.events_dir):
        meta = read_meta(path)
        events, _ = read_events(path)
        day = replay_day(events, meta)
        stem = os.path.splitext(os.path.basename(path))[0]
        for h in horizons:
            threshold = (args.threshold if args.threshold is not None
                         else HORIZON_THRESHOLDS.get(h))
            if threshold is None:
                raise DataError(f"horizon {h} has no paired threshold; "
                                "pass --threshold")
            series = label_series(day.mid, LabelParams(h, threshold))
            out = os.path.join(args.out_dir, f"{stem}_h{h}.labels")
            write_label_file(out, series)
            print(f"{path}: horizon {h} -> {out} ({len(series.labels)} labels)")
    return EXIT_OK


_CONFIG_FLAG_KEYS = (
    "events_dir", "features_dir", "out_dir", "protocol", "horizon",
    "threshold", "representation", "classifier", "unsafe_combo", "seed",
    "epochs", "batch_size", "select_c", "fixed_c", "ae_epochs",
    "n_codewords", "fuzziness", "n_prototypes", "fit_cap", "n_jobs",
)


def _build_config(args) -> config_mod.ExperimentConfig:
    values = {}
    if args.config:
        values.update(config_mod.from_file(args.config).to_dict())
    for key in _CONFIG_FLAG_KEYS:
        v = getattr(args, key, None)
        if v is not None:
            values[key] = v
    return config_mod.from_dict(values)


def cmd_train(args) -> int:
    config = _build_config(args)
    log = (lambda msg: print(msg, file=sys.stderr)) if not args.quiet else None
    result = pipeline.run_experiment(config, log=log)
    failed = [fr.fold for fr in result.fold_results if fr.error]
    if failed:
        print(f"failed folds: {', '.join(failed)}", file=sys.stderr)
    print(pipeline.format_summary(pipeline.summarize_results(result.rows)))
    print(f"results: {result.results_path}")
    print(f"manifest: {result.manifest_path}")
    if not result.rows:
        print("every fold failed; see the manifest diagnostics",
              file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


def cmd_replay(args) -> int:
    report = pipeline.replay_manifest(args.manifest, args.out_dir)
    if report.match:
        print("replay reproduced all outputs bit-exactly")
        return EXIT_OK
    print("replay MISMATCH in: " + ", ".join(report.mismatches))
    return EXIT_DATA


def _print_report(report) -> None:
    classes = ("-1", "0", "+1")
    print("confusion (rows = truth):")
    for i, row in enumerate(report.confusion):
        cells = " ".join(f"{v:>8d}" for v in row)
        print(f"  {classes[i]:>2} {cells}")
    for name, per_class, macro in (
            ("precision", report.class_precision, report.precision),
            ("recall", report.class_recall, report.recall),
            ("f-score", report.class_f, report.f_score)):
        cells = " ".join(f"{v:7.2f}" for v in per_class)
        print(f"{name:>9}: {cells}  macro {macro:.2f}")


def cmd_evaluate(args) -> int:
    bundle = pipeline.load_bundle(args.bundle)
    inputs = pipeline.load_days(
        events_dir=args.events_dir or "", features_dir=args.features_dir or "",
        horizon=bundle.horizon, threshold=bundle.threshold,
        smoothing=bundle.smoothing)
    report = pipeline.evaluate_bundle(bundle, inputs,
                                      predictions_dir=args.predictions_dir)
    _print_report(report)
    return EXIT_OK


def cmd_bench(args) -> int:
    bundle = pipeline.load_bundle(args.bundle)
    inputs = pipeline.load_days(
        events_dir=args.events_dir or "", features_dir=args.features_dir or "",
        horizon=bundle.horizon, threshold=bundle.threshold,
        smoothing=bundle.smoothing)
    rows = []
    for day in inputs:
        out = bundle.day_rows(day.features)
        if out is not None:
            rows.append(out[0])
    if not rows:
        raise DataError("corpus has no day long enough to benchmark")
    X = np.vstack(rows)
    report = pipeline.benchmark_predict(bundle.classifier, X,
                                        n_single=args.n_single)
    payload = report.to_dict()
    if args.events_dir:
        payload["feature_blocks_per_s"] = _feature_rate(args.events_dir)
    print(json.dumps(payload, indent=2, sort_keys=True))
    return EXIT_OK


def _feature_rate(events_dir: str) -> float:
    blocks = 0
    seconds = 0.0
    for path in _corpus_paths(events_dir):
        meta = read_meta(path)
        events, _ = read_events(path)
        day = replay_day(events, meta)
        t0 = time.perf_counter()
        day_feature_matrix(day)
        seconds += time.perf_counter() - t0
        blocks += day.n_blocks
    return blocks / seconds if seconds > 0 else float("inf")


def cmd_stats(args) -> int:
    rows = pipeline.read_results(args.results)
    scores, names, datasets = pipeline.method_score_matrix(rows, args.metric)
    comparison = friedman_test(scores)
    print(f"methods ({len(names)}), datasets ({len(datasets)}):")
    order = np.argsort(comparison.avg_ranks)
    for j in order:
        print(f"  {names[j]:<28} avg rank {comparison.avg_ranks[j]:.3f}")
    print(f"friedman statistic {comparison.statistic:.6g}, "
          f"p-value {comparison.p_value:.6g}")
    cd = nemenyi_cd(k=scores.shape[0], n=scores.shape[1], alpha=args.alpha)
    print(f"nemenyi critical difference (alpha={args.alpha}): {cd:.4f}")
    sig = nemenyi_compare(comparison.avg_ranks, cd)
    for a in range(len(names)):
        for b in range(a + 1, len(names)):
            if sig[a, b]:
                print(f"  {names[a]} vs {names[b]}: significant")
    return EXIT_OK


def cmd_report(args) -> int:
    rows = pipeline.read_results(args.results)
    text = pipeline.format_summary(pipeline.summarize_results(rows))
    print(text)
    if args.out:
        with open(args.out, "w", newline="\n") as fh:
            fh.write(text + "\n")
    return EXIT_OK


# -- parser -----------------------------------------------------------

def _add_config_flags(p: Parser) -> None:
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--events-dir", dest="events_dir")
    p.add_argument("--features-dir", dest="features_dir")
    p.add_argument("--out-dir", dest="out_dir")
    p.add_argument("--protocol", choices=("anchored_walk_forward",
                                          "holdout_per_stock"))
    p.add_argument("--horizon", type=int)
    p.add_argument("--threshold", type=float)
    p.add_argument("--representation")
    p.add_argument("--classifier", choices=("svm", "slfn", "mlp"))
    p.add_argument("--unsafe-combo", dest="unsafe_combo",
                   action="store_true", default=None,
                   help="allow representation combos outside the "
                        "evaluated eight")
    p.add_argument("--seed", type=int)
    p.add_argument("--epochs", type=int)
    p.add_argument("--batch-size", dest="batch_size", type=int)
    p.add_argument("--select-c", dest="select_c",
                   action=argparse.BooleanOptionalAction)
    p.add_argument("--fixed-c", dest="fixed_c", type=float)
    p.add_argument("--ae-epochs", dest="ae_epochs", type=int)
    p.add_argument("--n-codewords", dest="n_codewords", type=int)
    p.add_argument("--fuzziness", type=float)
    p.add_argument("--n-prototypes", dest="n_prototypes", type=int)
    p.add_argument("--fit-cap", dest="fit_cap", type=int)
    p.add_argument("--n-jobs", dest="n_jobs", type=int)


def build_parser() -> Parser:
    parser = Parser(prog="lobcast",
                    description="mid-price direction forecasting toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic event corpus")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--stocks", type=int, default=5)
    p.add_argument("--days", type=int, default=10)
    p.add_argument("--events-per-day", dest="events_per_day", type=int,
                   default=34_000)
    p.add_argument("--tick-size", dest="tick_size", type=float, default=0.01)
    p.add_argument("--base-price", dest="base_price", type=float,
                   default=20.0)
    p.add_argument("--drift", type=float, default=3.0)
    p.add_argument("--noise", type=float, default=0.0005)
    p.add_argument("--regime", choices=REGIMES, default="mixed")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("ingest", help="validate files into a store")
    p.add_argument("--store-dir", required=True)
    p.add_argument("paths", nargs="+")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("features", help="extract per-block feature matrices")
    p.add_argument("--events-dir", required=True)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("labels", help="compute direction labels")
    p.add_argument("--events-dir", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--horizon", type=int, action="append",
                   help="repeatable; defaults to 1, 5 and 10")
    p.add_argument("--threshold", type=float,
                   help="override the paired threshold")
    p.set_defaults(func=cmd_labels)

    p = sub.add_parser("train", help="run a full experiment")
    _add_config_flags(p)
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("replay", help="rerun a manifest and verify outputs")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("evaluate", help="score a saved predictor bundle")
    p.add_argument("--bundle", required=True)
    p.add_argument("--events-dir")
    p.add_argument("--features-dir")
    p.add_argument("--predictions-dir",
                   help="also write per-day prediction files")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("bench", help="latency/throughput of a saved bundle")
    p.add_argument("--bundle", required=True)
    p.add_argument("--events-dir")
    p.add_argument("--features-dir")
    p.add_argument("--n-single", dest="n_single", type=int, default=1000)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("stats", help="rank statistics over a results table")
    p.add_argument("--results", required=True)
    p.add_argument("--metric", default="macro_f",
                   choices=("macro_precision", "macro_recall", "macro_f"))
    p.add_argument("--alpha", type=float, default=0.05)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("report", help="summarize a results table")
    p.add_argument("--results", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
