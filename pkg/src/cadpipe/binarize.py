"""Turning discretized records into a boolean patient x item matrix.

Every input feature becomes one item (column), except gender, which becomes
one column per gender label. Discretized numeric features get a ``2`` suffix
(``HB2``) and are True whenever the label is not Normal. Columns are sorted
by name so the layout depends only on the schema.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .dataset import BINOMINAL, POLYNOMIAL, DataError, FeatureSchema
from .profiling import LABEL_ORDER, NORMAL, DiscretizedRecord

ABSENT_LABELS = frozenset({"no", "normal"})
NUMERIC_SUFFIX = "2"


@dataclass
class BinaryMatrix:
    """Boolean design matrix: rows are patients, columns are items.

    ``X`` has shape ``(n_records, n_features)``; ``target`` is True for the
    positive class.
    """

    feature_names: list[str]
    X: np.ndarray
    target: np.ndarray
    target_name: str = "target"

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=bool)
        self.target = np.asarray(self.target, dtype=bool)
        if self.X.ndim != 2 or self.X.shape[1] != len(self.feature_names):
            raise DataError("matrix width does not match feature names")
        if self.target.shape != (self.X.shape[0],):
            raise DataError("target length does not match record count")
        if len(set(self.feature_names)) != len(self.feature_names):
            raise DataError("feature names are not unique")

    @property
    def n_records(self) -> int:
        return self.X.shape[0]

    @property
    def n_features(self) -> int:
        return self.X.shape[1]

    def column(self, name: str) -> np.ndarray:
        return self.X[:, self.feature_names.index(name)]

    def select(self, names: Sequence[str]) -> "BinaryMatrix":
        idx = [self.feature_names.index(n) for n in names]
        return BinaryMatrix(list(names), self.X[:, idx], self.target, self.target_name)

    def rows(self, index) -> "BinaryMatrix":
        return BinaryMatrix(self.feature_names, self.X[index], self.target[index], self.target_name)

    def to_csv(self, path: str | Path) -> None:
        """Write 0/1 cells with a header; the target is the last column."""
        with Path(path).open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow([*self.feature_names, self.target_name])
            data = np.column_stack([self.X, self.target]).astype(np.uint8)
            for row in data:
                writer.writerow(row.tolist())

    @classmethod
    def from_csv(cls, path: str | Path, target: str | None = None) -> "BinaryMatrix":
        """Read a 0/1 CSV; ``target`` names the label column (default: last)."""
        with Path(path).open(newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise DataError(f"{path}: empty file") from None
            rows = [r for r in reader if r]
        if not rows:
            raise DataError(f"{path}: empty dataset")
        try:
            data = np.array(rows, dtype=np.int64)
        except ValueError:
            raise DataError(f"{path}: cells must be 0 or 1") from None
        if data.shape[1] != len(header) or not np.isin(data, (0, 1)).all():
            raise DataError(f"{path}: cells must be 0 or 1")
        t = len(header) - 1 if target is None else header.index(target)
        keep = [i for i in range(len(header)) if i != t]
        return cls([header[i] for i in keep], data[:, keep], data[:, t], header[t])


def is_present(feature: FeatureSchema, value: str) -> bool:
    if value not in feature.allowed_values:
        raise DataError(f"{feature.name}: value {value!r} not in {list(feature.allowed_values)}")
    if feature.present is not None:
        return value in feature.present
    return value.lower() not in ABSENT_LABELS


def binarize_binominal(feature: FeatureSchema, value: str) -> bool:
    """The presence/occurrence value maps to True, the alternative to False."""
    if feature.kind != BINOMINAL:
        raise DataError(f"{feature.name} is not binominal")
    return is_present(feature, value)


def binarize_polynomial(feature: FeatureSchema, value: str) -> bool:
    """The Normal/absence value maps to False, every other value to True."""
    if feature.kind != POLYNOMIAL:
        raise DataError(f"{feature.name} is not polynomial")
    return is_present(feature, value)


def expand_gender(gender: str) -> tuple[bool, bool]:
    """One-hot ``(male, female)`` for a gender label."""
    g = gender.strip().lower()
    if g not in ("male", "female"):
        raise DataError(f"unknown gender label {gender!r}")
    return g == "male", g == "female"


def binary_column_names(features: Sequence[FeatureSchema], gender_feature: str = "Gender") -> list[str]:
    names: list[str] = []
    for f in features:
        if f.is_target:
            continue
        if f.name == gender_feature:
            names.extend(f.allowed_values)
        elif f.is_numeric:
            names.append(f.name + NUMERIC_SUFFIX)
        else:
            names.append(f.name)
    return sorted(names)


def _row_bits(record: DiscretizedRecord, features, gender_feature) -> dict[str, bool]:
    bits: dict[str, bool] = {}
    for f in features:
        if f.is_target:
            continue
        value = record.values[f.name]
        if f.name == gender_feature:
            for label in f.allowed_values:
                if label.lower() not in ("male", "female"):
                    raise DataError(f"gender feature {f.name!r} has non-gender label {label!r}")
            male, female = expand_gender(value)
            for label in f.allowed_values:
                bits[label] = male if label.lower() == "male" else female
        elif f.is_numeric:
            if value not in LABEL_ORDER:
                raise DataError(f"{f.name}: {value!r} is not a discretized label")
            bits[f.name + NUMERIC_SUFFIX] = value != NORMAL
        elif f.kind == BINOMINAL:
            bits[f.name] = binarize_binominal(f, value)
        else:
            bits[f.name] = binarize_polynomial(f, value)
    return bits


def binarize_dataset(
    records: Sequence[DiscretizedRecord],
    features: Sequence[FeatureSchema],
    gender_feature: str = "Gender",
) -> BinaryMatrix:
    names = binary_column_names(features, gender_feature)
    target = next(f for f in features if f.is_target)
    X = np.zeros((len(records), len(names)), dtype=bool)
    y = np.zeros(len(records), dtype=bool)
    for i, rec in enumerate(records):
        bits = _row_bits(rec, features, gender_feature)
        X[i] = [bits[n] for n in names]
        y[i] = is_present(target, rec.values[target.name])
    return BinaryMatrix(names, X, y, target.name)


def write_discretized(records: Sequence[DiscretizedRecord], features: Sequence[FeatureSchema], path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["profile", *(f.name for f in features)])
        for rec in records:
            writer.writerow([rec.profile, *(rec.values[f.name] for f in features)])


def read_discretized(path, features: Sequence[FeatureSchema]) -> list[DiscretizedRecord]:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = {"profile", *(f.name for f in features)} - set(reader.fieldnames or ())
        if missing:
            raise DataError(f"{path}: missing column(s) {sorted(missing)}")
        out = []
        for row in reader:
            values = {}
            for f in features:
                v = row[f.name]
                if f.is_numeric:
                    if v not in LABEL_ORDER:
                        raise DataError(f"{path}: {f.name} has non-label value {v!r}")
                else:
                    canon = f.canonical(v)
                    if canon is None:
                        raise DataError(f"{path}: {f.name} has unknown value {v!r}")
                    v = canon
                values[f.name] = v
            out.append(DiscretizedRecord(row["profile"], values))
    if not out:
        raise DataError(f"{path}: empty dataset")
    return out
