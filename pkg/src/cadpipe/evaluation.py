"""Confusion-matrix metrics, ROC/AUC, stratified folds and information gain."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .dataset import DataError


class UndefinedMetricError(ZeroDivisionError):
    """A rate was requested whose denominator is zero."""


@dataclass(frozen=True)
class ConfusionMatrix:
    """Counts laid out as: f11 = TP, f10 = FN, f01 = FP, f00 = TN."""

    f11: int
    f10: int
    f01: int
    f00: int

    @property
    def total(self) -> int:
        return self.f11 + self.f10 + self.f01 + self.f00

    def __add__(self, other: "ConfusionMatrix") -> "ConfusionMatrix":
        return ConfusionMatrix(self.f11 + other.f11, self.f10 + other.f10,
                               self.f01 + other.f01, self.f00 + other.f00)


def confusion(predicted: Sequence[bool], actual: Sequence[bool]) -> ConfusionMatrix:
    p = np.asarray(predicted, dtype=bool)
    a = np.asarray(actual, dtype=bool)
    if p.shape != a.shape:
        raise DataError(f"length mismatch: {p.shape} predictions vs {a.shape} labels")
    if p.size == 0:
        raise DataError("empty input")
    return ConfusionMatrix(
        int(np.sum(p & a)), int(np.sum(~p & a)), int(np.sum(p & ~a)), int(np.sum(~p & ~a))
    )


def _ratio(num: int, den: int, what: str) -> float:
    if den == 0:
        raise UndefinedMetricError(f"{what} is undefined: zero denominator")
    return num / den


def accuracy(m: ConfusionMatrix) -> float:
    return _ratio(m.f00 + m.f11, m.total, "accuracy")


def sensitivity(m: ConfusionMatrix) -> float:
    return _ratio(m.f11, m.f11 + m.f10, "sensitivity")


def specificity(m: ConfusionMatrix) -> float:
    return _ratio(m.f00, m.f00 + m.f01, "specificity")


def fpr(m: ConfusionMatrix) -> float:
    return _ratio(m.f01, m.f00 + m.f01, "false positive rate")


def tpr(m: ConfusionMatrix) -> float:
    return _ratio(m.f11, m.f11 + m.f10, "true positive rate")


@dataclass
class RocCurve:
    points: list[tuple[float, float]]
    auc: float

    @property
    def fpr(self) -> np.ndarray:
        return np.array([p[0] for p in self.points])

    @property
    def tpr(self) -> np.ndarray:
        return np.array([p[1] for p in self.points])

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("fpr,tpr\n")
            for x, y in self.points:
                fh.write(f"{x!r},{y!r}\n")


def roc_auc(scores: Sequence[float], actual: Sequence[bool]) -> RocCurve:
    """Threshold sweep from the highest score down, equal scores moving together."""
    s = np.asarray(scores, dtype=float)
    a = np.asarray(actual, dtype=bool)
    if s.shape != a.shape:
        raise DataError("scores and labels differ in length")
    n_pos = int(a.sum())
    n_neg = a.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise DataError("ROC needs both classes")
    order = np.argsort(-s, kind="stable")
    s, a = s[order], a[order]
    # last index of each run of equal scores
    ends = np.flatnonzero(np.r_[s[1:] != s[:-1], True])
    tp = np.cumsum(a)[ends]
    fp = np.cumsum(~a)[ends]
    points = [(0.0, 0.0)] + [(f / n_neg, t / n_pos) for f, t in zip(fp.tolist(), tp.tolist())]
    if points[-1] != (1.0, 1.0):
        points.append((1.0, 1.0))
    # trapezoid in integer units to keep the area exact for tied groups
    tp_all = np.r_[0, tp]
    fp_all = np.r_[0, fp]
    area = np.sum(np.diff(fp_all) * (tp_all[1:] + tp_all[:-1])) / 2.0
    return RocCurve(points, float(area) / (n_pos * n_neg))


def stratified_kfold(n_records: int, labels: Sequence[bool], k: int, seed: int = 0
                     ) -> list[tuple[np.ndarray, np.ndarray]]:
    """Split indices into ``k`` (train, test) pairs with per-class balance.

    Each class is shuffled and dealt round-robin across folds, so fold sizes
    and per-fold class counts differ by at most one. ``k == n_records`` gives
    leave-one-out regardless of class sizes.
    """
    y = np.asarray(labels, dtype=bool)
    if y.shape != (n_records,):
        raise DataError("label count does not match n_records")
    if k < 2 or k > n_records:
        raise DataError(f"need 2 <= k <= {n_records}, got k={k}")
    if k != n_records:
        for cls in (True, False):
            size = int(np.sum(y == cls))
            if size < k:
                raise DataError(f"class {cls} has {size} members, fewer than k={k}")
    rng = np.random.default_rng(seed)
    order = np.concatenate([rng.permutation(np.flatnonzero(y == cls)) for cls in (True, False)])
    fold_of = np.empty(n_records, dtype=int)
    fold_of[order] = np.arange(n_records) % k
    everything = np.arange(n_records)
    return [(everything[fold_of != f], everything[fold_of == f]) for f in range(k)]


def entropy(distribution: Sequence[float]) -> float:
    """Shannon entropy in bits; 0 * log 0 is taken as 0."""
    p = np.asarray(distribution, dtype=float)
    if p.ndim != 1 or p.size == 0 or np.any(p < 0) or abs(p.sum() - 1.0) > 1e-9:
        raise ValueError(f"not a probability distribution: {distribution!r}")
    nz = p[p > 0]
    return float(-(nz * np.log2(nz)).sum()) + 0.0


def _label_entropy(y: np.ndarray) -> float:
    n = y.size
    if n == 0:
        return 0.0
    pos = int(y.sum())
    return entropy([pos / n, (n - pos) / n])


def info_gain(feature: Sequence[bool], target: Sequence[bool]) -> float:
    """Parent entropy minus the size-weighted entropy of the feature's partition."""
    x = np.asarray(feature, dtype=bool)
    y = np.asarray(target, dtype=bool)
    if x.shape != y.shape or x.size == 0:
        raise DataError("feature and target must be non-empty and equally long")
    n = y.size
    children = sum(
        (part.size / n) * _label_entropy(part) for part in (y[x], y[~x]) if part.size
    )
    return max(0.0, _label_entropy(y) - children)


def rank_features(X: np.ndarray, target: Sequence[bool], names: Sequence[str],
                  top_n: int | None = None) -> list[tuple[str, float]]:
    """Columns by information gain, highest first; ties ordered by name."""
    X = np.asarray(X, dtype=bool)
    gains = [(name, info_gain(X[:, j], target)) for j, name in enumerate(names)]
    gains.sort(key=lambda t: (-round(t[1], 12), t[0]))
    return gains if top_n is None else gains[:top_n]


@dataclass
class MetricReport:
    """Pooled metrics over all test folds plus a per-fold breakdown."""

    confusion: ConfusionMatrix
    accuracy: float
    sensitivity: float
    specificity: float
    fpr: float
    tpr: float
    auc: float
    roc: RocCurve
    per_fold: list[dict[str, float]] = field(default_factory=list)

    def macro(self) -> dict[str, float]:
        keys = ("accuracy", "sensitivity", "specificity", "auc")
        out = {}
        for key in keys:
            vals = [f[key] for f in self.per_fold if key in f and not math.isnan(f[key])]
            out[key] = float(np.mean(vals)) if vals else float("nan")
        return out

    def lines(self) -> list[str]:
        m = self.confusion
        out = [
            f"f11_tp = {m.f11}",
            f"f10_fn = {m.f10}",
            f"f01_fp = {m.f01}",
            f"f00_tn = {m.f00}",
            f"accuracy = {self.accuracy:.6f}",
            f"sensitivity = {self.sensitivity:.6f}",
            f"specificity = {self.specificity:.6f}",
            f"fpr = {self.fpr:.6f}",
            f"tpr = {self.tpr:.6f}",
            f"auc = {self.auc:.6f}",
        ]
        if self.per_fold:
            for key, val in self.macro().items():
                out.append(f"macro_{key} = {val:.6f}")
            for i, fold in enumerate(self.per_fold):
                cells = " ".join(f"{k}={v:.6f}" for k, v in fold.items())
                out.append(f"fold_{i} = {cells}")
        return out


def _safe(fn, m) -> float:
    try:
        return fn(m)
    except UndefinedMetricError:
        return float("nan")


def metric_report(scores: Sequence[float], actual: Sequence[bool],
                  folds: Sequence[np.ndarray] | None = None) -> MetricReport:
    """Metrics for decision scores thresholded at 0 (score >= 0 is positive).

    ``folds`` lists the test indices of each fold; per-fold rates whose
    denominator is empty are reported as NaN.
    """
    s = np.asarray(scores, dtype=float)
    a = np.asarray(actual, dtype=bool)
    m = confusion(s >= 0.0, a)
    roc = roc_auc(s, a)
    per_fold = []
    for idx in folds or ():
        fm = confusion(s[idx] >= 0.0, a[idx])
        row = {
            "accuracy": accuracy(fm),
            "sensitivity": _safe(sensitivity, fm),
            "specificity": _safe(specificity, fm),
        }
        if 0 < a[idx].sum() < len(idx):
            row["auc"] = roc_auc(s[idx], a[idx]).auc
        per_fold.append(row)
    return MetricReport(m, accuracy(m), sensitivity(m), specificity(m), fpr(m), tpr(m),
                        roc.auc, roc, per_fold)
