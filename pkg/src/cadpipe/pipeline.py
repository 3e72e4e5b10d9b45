"""End-to-end run: discretize, binarize, mine, inject, GA-select, cross-validate.

Every stage writes its artifact into the report directory so it can be
inspected or fed back into the corresponding CLI subcommand:

    discretized.csv   profile + Low/Normal/High labels
    binary.csv        0/1 items, target last
    itemsets.tsv      frequent itemsets (name, k, support_count, support)
    augmented.csv     binary.csv plus one column per injected itemset
    selected_features.txt, ga_history.csv, model.txt
    metrics.txt, roc.csv
    manifest.txt      resolved parameters and headline numbers

The manifest holds no timings or timestamps, so identical inputs and seed
give a byte-identical manifest.
"""

from __future__ import annotations

import logging
import time
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .binarize import BinaryMatrix, binarize_dataset, write_discretized
from .config import read_features, read_profiles, read_ranges
from .dataset import load_dataset
from .evaluation import MetricReport, metric_report, stratified_kfold
from .gafs import FitnessEvaluator, GaConfig, GaResult, run_ga
from .miner import AugmentedMatrix, MinerConfig, format_itemsets, mine_and_inject
from .profiling import discretize_dataset
from .svm import SvmConfig, decision_function, save_model, train

log = logging.getLogger(__name__)


class PipelineError(RuntimeError):
    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"stage {stage!r} failed: {cause}")
        self.stage = stage
        self.cause = cause


@dataclass
class PipelineConfig:
    data_path: Path
    config_path: Path
    report_dir: Path
    miner: MinerConfig = field(default_factory=lambda: MinerConfig(0.1))
    ga: GaConfig = field(default_factory=GaConfig)
    svm: SvmConfig = field(default_factory=SvmConfig)
    eval_folds: int = 10
    seed: int = 0
    # GA sees only the outer training folds; False runs it once on all rows
    nested_cv: bool = True
    # in nested mode, also run the GA on all rows to produce model.txt
    final_model: bool = True


@dataclass
class PipelineReport:
    n_records: int
    n_base_features: int
    n_itemsets: int
    n_augmented_features: int
    selected_features: list[str]
    fold_selected_counts: list[int]
    metrics: MetricReport
    report_dir: Path


@contextmanager
def _stage(name: str):
    start = time.perf_counter()
    log.info("stage %s: start", name)
    try:
        yield
    except Exception as exc:
        log.error("stage %s failed: %s", name, exc)
        raise PipelineError(name, exc) from exc
    log.info("stage %s: done in %.2fs", name, time.perf_counter() - start)


def _sub_seed(seed: int, *keys: int) -> int:
    return int(np.random.SeedSequence([seed, *keys]).generate_state(1)[0])


def _select(aug: AugmentedMatrix, rows: np.ndarray, ga: GaConfig, svm: SvmConfig) -> GaResult:
    X = aug.X
    ev = FitnessEvaluator(X[rows], aug.target[rows], svm, ga.fitness_folds, ga.seed)
    return run_ga(None, ga, svm, evaluator=ev)


def cross_validate_selection(
    aug: AugmentedMatrix, cfg: PipelineConfig
) -> tuple[MetricReport, list[np.ndarray], GaResult | None]:
    """Outer k-fold estimate of the select-then-classify procedure."""
    X = aug.X.astype(float)
    y = aug.target
    splits = stratified_kfold(len(y), y, cfg.eval_folds, cfg.seed)
    scores = np.empty(len(y))
    masks: list[np.ndarray] = []
    shared: GaResult | None = None
    if not cfg.nested_cv:
        ga = GaConfig(**{**asdict(cfg.ga), "seed": _sub_seed(cfg.seed, 0)})
        shared = _select(aug, np.arange(len(y)), ga, cfg.svm)
    for f, (train_idx, test_idx) in enumerate(splits):
        if cfg.nested_cv:
            ga = GaConfig(**{**asdict(cfg.ga), "seed": _sub_seed(cfg.seed, f + 1)})
            mask = _select(aug, train_idx, ga, cfg.svm).best_mask
            log.info("outer fold %d: %d columns selected", f, mask.sum())
        else:
            mask = shared.best_mask
        masks.append(mask)
        model = train(X[np.ix_(train_idx, mask)], y[train_idx], cfg.svm)
        scores[test_idx] = decision_function(model, X[np.ix_(test_idx, mask)])
    report = metric_report(scores, y, [t for _, t in splits])
    return report, masks, shared


def _write_lines(path: Path, lines) -> None:
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def run_pipeline(cfg: PipelineConfig) -> PipelineReport:
    out = Path(cfg.report_dir)
    out.mkdir(parents=True, exist_ok=True)

    with _stage("load"):
        features, ignore = read_features(cfg.config_path)
        raw = load_dataset(cfg.data_path, features, ignore)

    with _stage("discretize"):
        profiles = read_profiles(cfg.config_path)
        ranges = read_ranges(cfg.config_path)
        records = discretize_dataset(raw, profiles, ranges)
        write_discretized(records, features, out / "discretized.csv")

    with _stage("binarize"):
        matrix: BinaryMatrix = binarize_dataset(records, features, profiles.gender_feature)
        matrix.to_csv(out / "binary.csv")

    with _stage("mine"):
        itemsets, aug = mine_and_inject(matrix, cfg.miner)
        (out / "itemsets.tsv").write_text(format_itemsets(itemsets), encoding="utf-8")
        aug.to_matrix().to_csv(out / "augmented.csv")
        log.info("%d frequent itemsets, %d augmented columns", len(itemsets), aug.n_features)

    with _stage("select"):
        report, masks, shared = cross_validate_selection(aug, cfg)
        final = shared
        if final is None and cfg.final_model:
            ga = GaConfig(**{**asdict(cfg.ga), "seed": _sub_seed(cfg.seed, 0)})
            final = _select(aug, np.arange(aug.base.n_records), ga, cfg.svm)
        selected: list[str] = []
        if final is not None:
            names = aug.feature_names
            selected = [names[i] for i in np.flatnonzero(final.best_mask)]
            _write_lines(out / "selected_features.txt", selected)
            (out / "ga_history.csv").write_text(final.history_csv(), encoding="utf-8")
            X = aug.X[:, final.best_mask]
            save_model(train(X, aug.target, cfg.svm, selected), out / "model.txt")

    with _stage("evaluate"):
        _write_lines(out / "metrics.txt", report.lines())
        report.roc.to_csv(out / "roc.csv")

    result = PipelineReport(
        n_records=matrix.n_records,
        n_base_features=matrix.n_features,
        n_itemsets=len(itemsets),
        n_augmented_features=aug.n_features,
        selected_features=selected,
        fold_selected_counts=[int(m.sum()) for m in masks],
        metrics=report,
        report_dir=out,
    )
    _write_lines(out / "manifest.txt", manifest_lines(cfg, result))
    return result


def manifest_lines(cfg: PipelineConfig, rep: PipelineReport) -> list[str]:
    lines = [
        "# cadpipe run manifest",
        f"data_path = {cfg.data_path}",
        f"config_path = {cfg.config_path}",
        f"seed = {cfg.seed}",
        f"eval_folds = {cfg.eval_folds}",
        f"nested_cv = {cfg.nested_cv}",
        f"final_model = {cfg.final_model}",
    ]
    for prefix, section in (("miner", cfg.miner), ("ga", cfg.ga), ("svm", cfg.svm)):
        for key, value in asdict(section).items():
            lines.append(f"{prefix}.{key} = {value}")
    lines += [
        f"n_records = {rep.n_records}",
        f"n_base_features = {rep.n_base_features}",
        f"n_extracted_features = {rep.n_itemsets}",
        f"n_augmented_features = {rep.n_augmented_features}",
        f"n_selected_features = {len(rep.selected_features)}",
        f"fold_selected_counts = {','.join(map(str, rep.fold_selected_counts))}",
    ]
    lines += rep.metrics.lines()
    return lines
