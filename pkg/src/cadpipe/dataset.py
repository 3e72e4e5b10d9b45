"""Typed loading of clinical CSV tables against a declared feature schema."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

NUMERIC = "numeric"
BINOMINAL = "binominal"
POLYNOMIAL = "polynomial"
KINDS = (NUMERIC, BINOMINAL, POLYNOMIAL)

INPUT = "input"
TARGET = "target"

Value = float | str


class DataError(ValueError):
    """Raised when input data or configuration violates its declared schema."""


class SchemaError(DataError):
    pass


@dataclass(frozen=True)
class FeatureSchema:
    """One column of the clinical table.

    ``column`` is the header used in source files when it differs from
    ``name``; ``aliases`` maps raw cell labels (e.g. ``"1"`` or ``"Fmale"``)
    onto canonical ``allowed_values``. ``present`` lists the categorical
    values that denote presence of a condition; ``None`` means "anything
    except No/Normal".
    """

    name: str
    kind: str
    unit: str | None = None
    allowed_values: tuple[str, ...] = ()
    role: str = INPUT
    column: str | None = None
    aliases: dict[str, str] = field(default_factory=dict, hash=False, compare=False)
    present: tuple[str, ...] | None = None

    @property
    def is_numeric(self) -> bool:
        return self.kind == NUMERIC

    @property
    def is_target(self) -> bool:
        return self.role == TARGET

    def headers(self) -> tuple[str, ...]:
        if self.column and self.column != self.name:
            return (self.name, self.column)
        return (self.name,)

    def canonical(self, raw: str) -> str | None:
        """Map a raw categorical cell to its allowed value, ignoring case."""
        text = raw.strip()
        lowered = text.lower()
        for value in self.allowed_values:
            if value.lower() == lowered:
                return value
        for alias, value in self.aliases.items():
            if alias.lower() == lowered:
                return value
        return None


RawRecord = dict[str, Value]


@dataclass
class RawDataset:
    schema: list[FeatureSchema]
    records: list[RawRecord]

    def __len__(self) -> int:
        return len(self.records)

    @property
    def target(self) -> FeatureSchema:
        return next(f for f in self.schema if f.is_target)

    def feature(self, name: str) -> FeatureSchema:
        for f in self.schema:
            if f.name == name:
                return f
        raise KeyError(name)


def validate_schema(schema: Sequence[FeatureSchema]) -> None:
    """Raise :class:`SchemaError` on the first violated schema invariant."""
    seen: set[str] = set()
    targets = 0
    for f in schema:
        if f.name in seen:
            raise SchemaError(f"duplicate feature {f.name!r}")
        seen.add(f.name)
        if f.kind not in KINDS:
            raise SchemaError(f"feature {f.name!r}: unknown kind {f.kind!r}")
        if f.role not in (INPUT, TARGET):
            raise SchemaError(f"feature {f.name!r}: unknown role {f.role!r}")
        targets += f.role == TARGET
        n_values = len(f.allowed_values)
        if f.kind == NUMERIC and n_values:
            raise SchemaError(f"numeric feature {f.name!r} declares allowed values")
        if f.kind == BINOMINAL and n_values != 2:
            raise SchemaError(f"binominal feature {f.name!r} needs exactly 2 values, got {n_values}")
        if f.kind == POLYNOMIAL and n_values < 3:
            raise SchemaError(f"polynomial feature {f.name!r} needs at least 3 values, got {n_values}")
        if len({v.lower() for v in f.allowed_values}) != n_values:
            raise SchemaError(f"feature {f.name!r} has duplicate allowed values")
        for alias, value in f.aliases.items():
            if value not in f.allowed_values:
                raise SchemaError(f"feature {f.name!r}: alias {alias!r} maps to unknown value {value!r}")
        if f.present is not None:
            unknown = set(f.present) - set(f.allowed_values)
            if unknown:
                raise SchemaError(f"feature {f.name!r}: presence values {sorted(unknown)} not allowed")
    if targets == 0:
        raise SchemaError("schema has no target")
    if targets > 1:
        raise SchemaError("schema has multiple targets")


def _parse_numeric(text: str, row: int, column: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise DataError(f"row {row}, column {column!r}: cannot parse {text!r} as a number") from None
    if not math.isfinite(value):
        raise DataError(f"row {row}, column {column!r}: non-finite value {text!r}")
    return value


def load_dataset(
    path: str | Path,
    schema: Sequence[FeatureSchema],
    ignore_columns: Iterable[str] = (),
) -> RawDataset:
    """Read a CSV file and type every cell according to ``schema``.

    Columns listed in ``ignore_columns`` are dropped; any other column that
    is not in the schema is an error, as is a schema feature with no column.
    Row numbers in error messages count the header as row 1.
    """
    validate_schema(schema)
    path = Path(path)
    ignored = set(ignore_columns)
    with path.open(newline="", encoding="utf-8-sig") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DataError(f"{path}: empty file") from None

        position: dict[str, int] = {}
        for f in schema:
            hits = [h for h in f.headers() if h in header]
            if not hits:
                raise DataError(f"{path}: missing column {f.name!r}")
            if len(hits) > 1:
                raise DataError(f"{path}: feature {f.name!r} appears under two headers {hits}")
            position[f.name] = header.index(hits[0])
        claimed = set(position.values())
        extra = [h for i, h in enumerate(header) if i not in claimed and h not in ignored]
        if extra:
            raise DataError(f"{path}: unexpected column(s) {extra}")

        records: list[RawRecord] = []
        for row_no, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(header):
                raise DataError(f"row {row_no}: expected {len(header)} cells, got {len(row)}")
            record: RawRecord = {}
            for f in schema:
                cell = row[position[f.name]].strip()
                if cell == "":
                    raise DataError(f"row {row_no}, column {f.name!r}: missing value")
                if f.is_numeric:
                    record[f.name] = _parse_numeric(cell, row_no, f.name)
                else:
                    value = f.canonical(cell)
                    if value is None:
                        raise DataError(
                            f"row {row_no}, column {f.name!r}: value {cell!r} not in {list(f.allowed_values)}"
                        )
                    record[f.name] = value
            records.append(record)
    if not records:
        raise DataError(f"{path}: empty dataset")
    return RawDataset(list(schema), records)


def _format_number(value: float) -> str:
    return repr(float(value))


def write_dataset(dataset: RawDataset, path: str | Path) -> None:
    """Write ``dataset`` with canonical column names; inverse of :func:`load_dataset`."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([f.name for f in dataset.schema])
        for record in dataset.records:
            writer.writerow(
                _format_number(record[f.name]) if f.is_numeric else record[f.name]
                for f in dataset.schema
            )
