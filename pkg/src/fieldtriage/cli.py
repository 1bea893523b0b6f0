"""Command-line entry point: one subcommand per pipeline stage.

Exit codes: 0 success, 1 usage error, 2 data error (bad files/inputs),
3 runtime failure. Every stage is deterministic in (inputs, seed), and no
output file embeds wall-clock time, so reruns are byte-identical.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys

from . import analysis, metrics, rules, serialize, simulation, stats
from .ensemble import ensemble_fit
from .errors import DataError, TriageError
from .inference import predict_records, score_records
from .mlp import DEFAULT_HIDDEN_WIDTHS, TrainConfig, mlp_init, mlp_train
from .preprocess import (apply_normalization, feature_matrix, fit_normalization,
                         label_vector, preprocess, train_test_split)
from .preprocess import rebalance as rebalance_fn
from .records import (ACUITY_LEVELS, FIVE_FEATURES, MAIN_FEATURES, VITAL_FIELDS,
                      load_records, save_records)
from .scenario import load_scenario
from .seeds import stage_seed
from .server import recover
from .synthesize import synthesize
from .tree import tree_fit
from .webapp import serve

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_RUNTIME = 3


def _write_json(path: str, data) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _read_json(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise DataError(f"file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise DataError(f"not valid JSON: {path}: {exc}") from exc


def _sha256(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


# --- stage implementations (shared by subcommands and the pipeline) --------

def do_preprocess(input_path: str, output_path: str,
                  report_path: str | None = None) -> dict[str, str]:
    records, diagnostics = load_records(input_path)
    cleaned, report = preprocess(records)
    save_records(output_path, cleaned)
    report_path = report_path or os.path.splitext(output_path)[0] + ".report.json"
    _write_json(report_path, {**report.as_dict(),
                              "parse_diagnostics": [str(d) for d in diagnostics]})
    return {"clean": output_path, "report": report_path}


def do_analyze(input_path: str, output_path: str, bin_feature: str = "temperature",
               bin_width: float = 2.0) -> dict[str, str]:
    records, _ = load_records(input_path)
    matrix = feature_matrix(records, VITAL_FIELDS)
    target = label_vector(records)
    coefficients = analysis.pearson_correlation(matrix, target)
    bins = analysis.bin_distribution(records, bin_feature, bin_width)
    _write_json(output_path, {
        "correlations": dict(zip(VITAL_FIELDS, coefficients)),
        "binning": {
            "feature": bin_feature,
            "bin_width": bin_width,
            "bins": [
                {"lower": b.lower, "upper": b.upper,
                 "counts": {str(a): c for a, c in b.counts.items()}}
                for b in bins
            ],
        },
    })
    return {"analysis": output_path}


def do_synthesize(output_path: str, count: int, seed: int,
                  rules_path: str | None = None) -> dict[str, str]:
    table = rules.load_rule_table(rules_path) if rules_path else None
    records = synthesize(count, table=table, seed=stage_seed(seed, "synthesize"))
    save_records(output_path, records)
    return {"dataset": output_path}


def do_train(kind: str, input_path: str, model_path: str, seed: int,
             ratio: float = 0.8, rebalance: bool = False,
             features: tuple[str, ...] | None = None,
             epochs: int | None = None, batch_size: int | None = None,
             learning_rate: float | None = None,
             hidden: tuple[int, ...] | None = None,
             max_depth: int | None = None, min_samples: int = 2,
             test_output: str | None = None) -> dict[str, str]:
    if kind not in ("mlp", "tree", "ensemble"):
        raise DataError(f"unknown model kind {kind!r}")
    records, _ = load_records(input_path)
    if rebalance:
        records = rebalance_fn(records, stage_seed(seed, "rebalance"))
    train_records, test_records = train_test_split(records, ratio,
                                                   stage_seed(seed, "split"))
    if not train_records or not test_records:
        raise DataError(f"split left an empty partition "
                        f"({len(train_records)} train / {len(test_records)} test)")
    config = TrainConfig(
        learning_rate=learning_rate if learning_rate is not None else 1e-3,
        batch_size=batch_size if batch_size is not None else 128,
        epochs=epochs if epochs is not None else 100,
        seed=stage_seed(seed, "train"),
    )
    truth = label_vector(train_records)
    if kind == "mlp":
        feats = tuple(features) if features else MAIN_FEATURES
        norm = fit_normalization(train_records, feats)
        inputs = apply_normalization(feature_matrix(train_records, feats), norm)
        model = mlp_init(len(feats), hidden or DEFAULT_HIDDEN_WIDTHS, config.seed)
        model.normalization = norm
        model, _history = mlp_train(model, inputs, truth, config)
    elif kind == "tree":
        feats = tuple(features) if features else MAIN_FEATURES
        inputs = feature_matrix(train_records, feats)
        model = tree_fit(inputs, truth, max_depth=max_depth,
                         min_samples=min_samples, features=feats)
    else:
        feats = tuple(features) if features else FIVE_FEATURES
        norm = fit_normalization(train_records, feats)
        inputs = apply_normalization(feature_matrix(train_records, feats), norm)
        model = ensemble_fit(inputs, truth, config, seed=config.seed, features=feats)
        model = type(model)(learners=model.learners, features=model.features,
                            normalization=norm)
    serialize.save_model(model_path, model)
    test_output = test_output or os.path.splitext(model_path)[0] + ".test.csv"
    save_records(test_output, test_records)
    return {"model": model_path, "test": test_output}


def do_evaluate(model_path: str, input_path: str, output_path: str,
                roc_dir: str | None = None) -> dict[str, str]:
    model = serialize.load_model(model_path)
    records, _ = load_records(input_path)
    if not records:
        raise DataError(f"no records to evaluate in {input_path}")
    truth = label_vector(records)
    predictions = predict_records(model, records)
    report = metrics.evaluate(predictions, truth)
    _write_json(output_path, report.as_dict())
    print(metrics.format_metrics_table(report))
    artifacts = {"metrics": output_path}
    if roc_dir:
        os.makedirs(roc_dir, exist_ok=True)
        scores = score_records(model, records)
        for acuity in ACUITY_LEVELS:
            curve = metrics.roc_auc(scores[:, acuity - 1], truth, acuity)
            path = os.path.join(roc_dir, f"roc_class_{acuity}.csv")
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(f"# auc,{curve.auc:.10g}\n")
                fh.write(metrics.roc_points_csv(curve))
            artifacts[f"roc_class_{acuity}"] = path
    return artifacts


def do_compare(model_a_path: str, model_b_path: str, input_path: str,
               output_path: str, n_subsets: int = 50, fraction: float = 0.2,
               seed: int = 0) -> dict[str, str]:
    model_a = serialize.load_model(model_a_path)
    model_b = serialize.load_model(model_b_path)
    records, _ = load_records(input_path)
    report = stats.compare_models(model_a, model_b, records, n_subsets=n_subsets,
                                  subset_fraction=fraction,
                                  seed=stage_seed(seed, "compare"))
    _write_json(output_path, report.as_dict())
    if report.insufficient_data:
        print(f"comparison inconclusive: {report.reason}")
    else:
        print(f"wins A {report.wins_a} / wins B {report.wins_b} / ties {report.ties}; "
              f"W={report.w_statistic:.1f} p={report.p_value:.3g}")
    return {"comparison": output_path}


def do_simulate(scenario_path: str, model_path: str, output_path: str,
                server_url: str | None = None, step_dt: float = 1.0,
                max_steps: int = 10000, seed: int | None = None) -> dict[str, str]:
    scenario = load_scenario(scenario_path)
    if seed is not None:
        scenario = type(scenario)(bounds=scenario.bounds, victims=scenario.victims,
                                  robots=scenario.robots,
                                  sensor_sigmas=scenario.sensor_sigmas,
                                  seed=seed, start_time_ms=scenario.start_time_ms)
    model = serialize.load_model(model_path)
    sink = simulation.HttpSink(server_url) if server_url else simulation.CollectorSink()
    log = simulation.run_mission(scenario, model, sink, step_dt=step_dt,
                                 max_steps=max_steps)
    simulation.write_mission_log(output_path, log)
    print(f"{len(log.reports)} reports in {log.steps} steps"
          + (f", {len(log.undelivered)} undelivered" if log.undelivered else ""))
    return {"mission_log": output_path}


def do_serve(log_path: str, host: str = "127.0.0.1", port: int = 8000,
             static_dir: str | None = None) -> dict[str, str]:
    registry = recover(log_path)
    serve(registry, host=host, port=port, static_dir=static_dir)
    return {}


# --- manifest-driven pipeline ----------------------------------------------

_STAGE_KEYS = {
    "preprocess": ("input", "output", "report"),
    "analyze": ("input", "output", "bin_feature", "bin_width"),
    "synthesize": ("output", "count", "rules"),
    "train": ("kind", "input", "model", "ratio", "rebalance", "features",
              "epochs", "batch_size", "learning_rate", "hidden", "max_depth",
              "min_samples", "test_output"),
    "evaluate": ("model", "input", "output", "roc_dir"),
    "compare": ("model_a", "model_b", "input", "output", "n_subsets", "fraction"),
    "simulate": ("scenario", "model", "output", "server_url", "step_dt", "max_steps"),
}

_PATH_KEYS = ("input", "output", "report", "rules", "model", "model_a", "model_b",
              "test_output", "roc_dir", "scenario")


def run_pipeline(manifest_path: str) -> int:
    """Execute the stages listed in a manifest; write a digest report.

    Relative paths are resolved against the manifest's directory, so a
    manifest plus its inputs is a self-contained, reproducible run.
    """
    manifest = _read_json(manifest_path)
    if not isinstance(manifest, dict) or not isinstance(manifest.get("stages"), list):
        raise DataError(f"manifest must be an object with a 'stages' list: {manifest_path}")
    base_dir = os.path.dirname(os.path.abspath(manifest_path))
    seed = int(manifest.get("seed", 0))
    artifacts: dict[str, str] = {}
    completed: list[str] = []
    failure: str | None = None
    report_path = os.path.join(base_dir, manifest.get("report", "run_report.json"))

    try:
        for i, stage in enumerate(manifest["stages"]):
            if not isinstance(stage, dict) or "stage" not in stage:
                raise DataError(f"stages[{i}]: each stage needs a 'stage' name")
            name = stage["stage"]
            if name not in _STAGE_KEYS:
                raise DataError(f"stages[{i}]: unknown stage {name!r}")
            kwargs = {}
            for key in _STAGE_KEYS[name]:
                if key in stage:
                    value = stage[key]
                    if key in _PATH_KEYS and isinstance(value, str):
                        value = os.path.join(base_dir, value)
                    if key in ("features", "hidden") and value is not None:
                        value = tuple(value)
                    kwargs[key] = value
            if name == "preprocess":
                produced = do_preprocess(kwargs["input"], kwargs["output"],
                                         kwargs.get("report"))
            elif name == "analyze":
                produced = do_analyze(kwargs["input"], kwargs["output"],
                                      kwargs.get("bin_feature", "temperature"),
                                      kwargs.get("bin_width", 2.0))
            elif name == "synthesize":
                produced = do_synthesize(kwargs["output"], int(kwargs["count"]),
                                         seed, kwargs.get("rules"))
            elif name == "train":
                produced = do_train(kwargs["kind"], kwargs["input"], kwargs["model"],
                                    seed, ratio=kwargs.get("ratio", 0.8),
                                    rebalance=bool(kwargs.get("rebalance", False)),
                                    features=kwargs.get("features"),
                                    epochs=kwargs.get("epochs"),
                                    batch_size=kwargs.get("batch_size"),
                                    learning_rate=kwargs.get("learning_rate"),
                                    hidden=kwargs.get("hidden"),
                                    max_depth=kwargs.get("max_depth"),
                                    min_samples=kwargs.get("min_samples", 2),
                                    test_output=kwargs.get("test_output"))
            elif name == "evaluate":
                produced = do_evaluate(kwargs["model"], kwargs["input"],
                                       kwargs["output"], kwargs.get("roc_dir"))
            elif name == "compare":
                produced = do_compare(kwargs["model_a"], kwargs["model_b"],
                                      kwargs["input"], kwargs["output"],
                                      n_subsets=kwargs.get("n_subsets", 50),
                                      fraction=kwargs.get("fraction", 0.2), seed=seed)
            else:
                produced = do_simulate(kwargs["scenario"], kwargs["model"],
                                       kwargs["output"],
                                       server_url=kwargs.get("server_url"),
                                       step_dt=kwargs.get("step_dt", 1.0),
                                       max_steps=kwargs.get("max_steps", 10000),
                                       seed=seed)
            completed.append(name)
            artifacts.update({k: v for k, v in produced.items()
                              if v and os.path.isfile(v)})
    except (TriageError, OSError) as exc:
        failure = str(exc)

    digests = {os.path.relpath(path, base_dir): _sha256(path)
               for path in sorted(set(artifacts.values()))}
    _write_json(report_path, {
        "seed": seed,
        "stages_completed": completed,
        "partial": failure is not None,
        "failed": failure,
        "artifacts": digests,
    })
    if failure is not None:
        raise DataError(failure)
    return EXIT_OK


# --- argument parsing -------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fieldtriage",
        description="Acuity classification pipeline, triage-robot simulator, "
                    "and command server.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("preprocess", help="clean a triage table")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--report", default=None)

    p = sub.add_parser("analyze", help="correlations and feature binning")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--bin-feature", default="temperature", choices=VITAL_FIELDS)
    p.add_argument("--bin-width", type=float, default=2.0)

    p = sub.add_parser("synthesize", help="generate rule-labeled synthetic records")
    p.add_argument("--output", required=True)
    p.add_argument("--count", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rules", default=None, help="rule table JSON (default built-in)")

    p = sub.add_parser("train", help="train a classifier")
    p.add_argument("kind", choices=("mlp", "tree", "ensemble"))
    p.add_argument("--input", required=True)
    p.add_argument("--model", required=True, help="output model path")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--ratio", type=float, default=0.8)
    p.add_argument("--rebalance", action="store_true")
    p.add_argument("--features", nargs="+", default=None, choices=VITAL_FIELDS)
    p.add_argument("--epochs", type=int, default=None)
    p.add_argument("--batch-size", type=int, default=None)
    p.add_argument("--learning-rate", type=float, default=None)
    p.add_argument("--hidden", nargs="+", type=int, default=None)
    p.add_argument("--max-depth", type=int, default=None)
    p.add_argument("--min-samples", type=int, default=2)
    p.add_argument("--test-output", default=None)

    p = sub.add_parser("evaluate", help="score a model on a dataset")
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--roc-dir", default=None)

    p = sub.add_parser("compare", help="paired statistical model comparison")
    p.add_argument("--model-a", required=True)
    p.add_argument("--model-b", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--subsets", type=int, default=50)
    p.add_argument("--fraction", type=float, default=0.2)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("simulate", help="run a robot mission against a scenario")
    p.add_argument("--scenario", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--output", required=True, help="mission log (JSON lines)")
    p.add_argument("--server-url", default=None)
    p.add_argument("--step-dt", type=float, default=1.0)
    p.add_argument("--max-steps", type=int, default=10000)
    p.add_argument("--seed", type=int, default=None,
                   help="override the scenario's seed")

    p = sub.add_parser("serve", help="run the command server")
    p.add_argument("--log", required=True, help="append-only event log path")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--static-dir", default=None,
                   help="serve a dashboard bundle at /")

    p = sub.add_parser("pipeline", help="run stages from a manifest")
    p.add_argument("--config", required=True, help="manifest JSON path")
    return parser


def _dispatch(args: argparse.Namespace) -> int:
    if args.command == "preprocess":
        do_preprocess(args.input, args.output, args.report)
    elif args.command == "analyze":
        do_analyze(args.input, args.output, args.bin_feature, args.bin_width)
    elif args.command == "synthesize":
        do_synthesize(args.output, args.count, args.seed, args.rules)
    elif args.command == "train":
        do_train(args.kind, args.input, args.model, args.seed, ratio=args.ratio,
                 rebalance=args.rebalance,
                 features=tuple(args.features) if args.features else None,
                 epochs=args.epochs, batch_size=args.batch_size,
                 learning_rate=args.learning_rate,
                 hidden=tuple(args.hidden) if args.hidden else None,
                 max_depth=args.max_depth, min_samples=args.min_samples,
                 test_output=args.test_output)
    elif args.command == "evaluate":
        do_evaluate(args.model, args.input, args.output, args.roc_dir)
    elif args.command == "compare":
        do_compare(args.model_a, args.model_b, args.input, args.output,
                   n_subsets=args.subsets, fraction=args.fraction, seed=args.seed)
    elif args.command == "simulate":
        do_simulate(args.scenario, args.model, args.output,
                    server_url=args.server_url, step_dt=args.step_dt,
                    max_steps=args.max_steps, seed=args.seed)
    elif args.command == "serve":
        do_serve(args.log, host=args.host, port=args.port,
                 static_dir=args.static_dir)
    else:
        return run_pipeline(args.config)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on usage errors, 0 on --help
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return _dispatch(args)
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except KeyboardInterrupt:
        return EXIT_RUNTIME
    except TriageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except Exception as exc:  # pragma: no cover - defensive
        print(f"unexpected failure: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
