"""Command-line entry point: ``cadpipe <subcommand> ...``.

Exit codes: 0 success, 1 usage error, 2 data or validation error,
3 internal error. Logs go to stderr; requested tables go to stdout.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import sys
from pathlib import Path

import numpy as np

from .binarize import BinaryMatrix, binarize_dataset, read_discretized, write_discretized
from .config import load_config, read_features, read_profiles, shipped_config_path
from .dataset import DataError, load_dataset
from .evaluation import metric_report, rank_features, stratified_kfold
from .gafs import GaConfig, cv_decision_values, run_ga
from .miner import MinerConfig, format_itemsets, mine_and_inject, sweep_min_sup
from .pipeline import PipelineConfig, PipelineError, run_pipeline
from .profiling import discretize_dataset
from .svm import SvmConfig, decision_function, load_model, save_model, train

log = logging.getLogger("cadpipe")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 0, 1, 2, 3
DATA_ERRORS = (DataError, FileNotFoundError, ValueError, KeyError, FloatingPointError)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _float_list(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _add_svm_flags(p):
    g = p.add_argument_group("svm")
    g.add_argument("--kernel", default="rbf", choices=["linear", "polynomial", "rbf", "sigmoid"])
    g.add_argument("--C", type=float, default=1.0, dest="svm_c")
    g.add_argument("--gamma", type=float, default=None, help="default: 1 / selected feature count")
    g.add_argument("--degree", type=int, default=3)
    g.add_argument("--coef0", type=float, default=0.0)
    g.add_argument("--tol", type=float, default=1e-3)


def _add_ga_flags(p):
    g = p.add_argument_group("genetic algorithm")
    g.add_argument("--population", type=int, default=50)
    g.add_argument("--generations", type=int, default=100)
    g.add_argument("--mutation-rate", type=float, default=None, help="default: 1 / feature count")
    g.add_argument("--crossover-rate", type=float, default=0.9)
    g.add_argument("--elitism", type=int, default=2)
    g.add_argument("--target-fitness", type=float, default=None)
    g.add_argument("--fitness-folds", type=int, default=5)


def _svm_config(a) -> SvmConfig:
    return SvmConfig(kernel=a.kernel, C=a.svm_c, gamma=a.gamma, degree=a.degree,
                     coef0=a.coef0, tol=a.tol, seed=a.seed)


def _ga_config(a) -> GaConfig:
    return GaConfig(population_size=a.population, crossover_rate=a.crossover_rate,
                    mutation_rate=a.mutation_rate, elitism_count=a.elitism,
                    max_generations=a.generations, target_fitness=a.target_fitness,
                    seed=a.seed, fitness_folds=a.fitness_folds, threads=a.threads)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, default=None,
                        help="study config (default: shipped Z-Alizadeh Sani config)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("-v", "--verbose", action="count", default=0)

    parser = _Parser(prog="cadpipe", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("discretize", parents=[common], help="raw CSV -> profile + Low/Normal/High CSV")
    p.add_argument("--data", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True)

    p = sub.add_parser("binarize", parents=[common], help="discretized CSV -> 0/1 CSV")
    p.add_argument("--data", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True)

    p = sub.add_parser("mine", parents=[common], help="frequent itemsets + augmented matrix")
    p.add_argument("--data", type=Path, required=True, help="binary CSV")
    p.add_argument("--min-sup", type=float, required=True)
    p.add_argument("--max-k", type=int, default=None)
    p.add_argument("--out", type=Path, required=True, help="output directory")

    p = sub.add_parser("sweep", parents=[common], help="itemset counts for several min_sup values")
    p.add_argument("--data", type=Path, required=True, help="binary CSV")
    p.add_argument("--min-sups", type=_float_list, required=True)
    p.add_argument("--max-k", type=int, default=None)

    p = sub.add_parser("select", parents=[common], help="GA + SVM wrapper feature selection")
    p.add_argument("--data", type=Path, required=True, help="augmented (or binary) CSV")
    p.add_argument("--out", type=Path, required=True, help="output directory")
    _add_ga_flags(p)
    _add_svm_flags(p)

    p = sub.add_parser("evaluate", parents=[common],
                       help="metrics + ROC: saved model on a test CSV, or k-fold CV on selected features")
    p.add_argument("--data", type=Path, required=True)
    p.add_argument("--model", type=Path, default=None)
    p.add_argument("--features", type=Path, default=None, help="selected feature list (CV mode)")
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--out", type=Path, required=True, help="output directory")
    _add_svm_flags(p)

    p = sub.add_parser("rank", parents=[common], help="information-gain ranking as CSV")
    p.add_argument("--data", type=Path, required=True)
    p.add_argument("--top", type=int, default=20)
    p.add_argument("--out", type=Path, default=None)

    p = sub.add_parser("run", parents=[common], help="full pipeline")
    p.add_argument("--data", type=Path, required=True, help="raw CSV")
    p.add_argument("--report-dir", type=Path, required=True)
    p.add_argument("--min-sup", type=float, default=0.1)
    p.add_argument("--max-k", type=int, default=None)
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--nested-cv", action=argparse.BooleanOptionalAction, default=True,
                   help="run the GA inside each outer training fold (default) "
                        "or once on all records before cross-validation")
    p.add_argument("--final-model", action=argparse.BooleanOptionalAction, default=True)
    _add_ga_flags(p)
    _add_svm_flags(p)
    return parser


def _config_path(a) -> Path:
    return a.config if a.config is not None else shipped_config_path()


def cmd_discretize(a) -> None:
    cfg = load_config(_config_path(a))
    raw = load_dataset(a.data, cfg.features, cfg.ignore_columns)
    records = discretize_dataset(raw, cfg.profiles, cfg.ranges)
    write_discretized(records, cfg.features, a.out)
    log.info("wrote %d discretized records to %s", len(records), a.out)


def cmd_binarize(a) -> None:
    features, _ = read_features(_config_path(a))
    profiles = read_profiles(_config_path(a))
    records = read_discretized(a.data, features)
    matrix = binarize_dataset(records, features, profiles.gender_feature)
    matrix.to_csv(a.out)
    log.info("wrote %d x %d binary matrix to %s", matrix.n_records, matrix.n_features, a.out)


def cmd_mine(a) -> None:
    matrix = BinaryMatrix.from_csv(a.data)
    itemsets, aug = mine_and_inject(matrix, MinerConfig(a.min_sup, a.max_k))
    a.out.mkdir(parents=True, exist_ok=True)
    (a.out / "itemsets.tsv").write_text(format_itemsets(itemsets), encoding="utf-8")
    aug.to_matrix().to_csv(a.out / "augmented.csv")
    print(f"{len(itemsets)} frequent itemsets; augmented matrix has {aug.n_features} columns")


def cmd_sweep(a) -> None:
    matrix = BinaryMatrix.from_csv(a.data)
    print("min_sup\tn_itemsets")
    for v, count in sweep_min_sup(matrix, a.min_sups, a.max_k):
        print(f"{v:g}\t{count}")


def cmd_select(a) -> None:
    matrix = BinaryMatrix.from_csv(a.data)
    svm_cfg, ga_cfg = _svm_config(a), _ga_config(a)
    result = run_ga(matrix, ga_cfg, svm_cfg)
    names = [matrix.feature_names[i] for i in np.flatnonzero(result.best_mask)]
    a.out.mkdir(parents=True, exist_ok=True)
    (a.out / "selected_features.txt").write_text("\n".join(names) + "\n", encoding="utf-8")
    (a.out / "ga_history.csv").write_text(result.history_csv(), encoding="utf-8")
    model = train(matrix.X[:, result.best_mask], matrix.target, svm_cfg, names)
    save_model(model, a.out / "model.txt")
    print(f"fitness {result.fitness:.4f} with {len(names)} of {matrix.n_features} features")


def cmd_evaluate(a) -> None:
    matrix = BinaryMatrix.from_csv(a.data)
    a.out.mkdir(parents=True, exist_ok=True)
    if a.model is not None:
        model = load_model(a.model)
        data = matrix.select(model.feature_names) if model.feature_names else matrix
        report = metric_report(decision_function(model, data.X), data.target)
        header = ["mode = holdout", f"model = {a.model}"]
    else:
        if a.features is not None:
            names = [ln for ln in a.features.read_text(encoding="utf-8").splitlines() if ln]
            matrix = matrix.select(names)
        splits = stratified_kfold(matrix.n_records, matrix.target, a.folds, a.seed)
        scores = cv_decision_values(matrix.X, matrix.target, _svm_config(a), splits)
        report = metric_report(scores, matrix.target, [t for _, t in splits])
        header = [f"mode = {a.folds}-fold", f"seed = {a.seed}", f"n_features = {matrix.n_features}",
                  f"svm = {_svm_config(a)}"]
    lines = header + report.lines()
    (a.out / "metrics.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
    report.roc.to_csv(a.out / "roc.csv")
    print("\n".join(report.lines()[:10]))


def cmd_rank(a) -> None:
    matrix = BinaryMatrix.from_csv(a.data)
    ranking = rank_features(matrix.X, matrix.target, matrix.feature_names, a.top)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["feature", "information_gain"])
    writer.writerows((name, f"{gain:.6f}") for name, gain in ranking)
    text = buf.getvalue()
    if a.out is not None:
        a.out.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_run(a) -> None:
    cfg = PipelineConfig(
        data_path=a.data,
        config_path=_config_path(a),
        report_dir=a.report_dir,
        miner=MinerConfig(a.min_sup, a.max_k),
        ga=_ga_config(a),
        svm=_svm_config(a),
        eval_folds=a.folds,
        seed=a.seed,
        nested_cv=a.nested_cv,
        final_model=a.final_model,
    )
    rep = run_pipeline(cfg)
    m = rep.metrics
    print(f"extracted {rep.n_itemsets} itemsets; selected {len(rep.selected_features)} features")
    print(f"accuracy {m.accuracy:.4f} sensitivity {m.sensitivity:.4f} "
          f"specificity {m.specificity:.4f} auc {m.auc:.4f}")


COMMANDS = {
    "discretize": cmd_discretize, "binarize": cmd_binarize, "mine": cmd_mine, "sweep": cmd_sweep,
    "select": cmd_select, "evaluate": cmd_evaluate, "rank": cmd_rank, "run": cmd_run,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    try:
        COMMANDS[args.command](args)
    except PipelineError as exc:
        log.error("%s", exc)
        return EXIT_DATA if isinstance(exc.cause, DATA_ERRORS) else EXIT_INTERNAL
    except DATA_ERRORS as exc:
        log.error("%s", exc)
        return EXIT_DATA
    except Exception:
        log.exception("internal error")
        return EXIT_INTERNAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
