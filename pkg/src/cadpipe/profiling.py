"""Patient profiles and profile-dependent discretization of numeric features.

A profile is one combination of (age tag, gender tag, condition tag). Each
numeric feature has, per profile, a crisp normal range; values below it are
``Low``, above it ``High``. Cut points may depend linearly on the patient's
own age, which is how ESR's "age/2" style limits are expressed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .dataset import DataError, RawDataset, RawRecord

LOW = "Low"
NORMAL = "Normal"
HIGH = "High"
LABEL_ORDER = {LOW: 0, NORMAL: 1, HIGH: 2}


@dataclass(frozen=True)
class AgeTag:
    """An age band; ``upper`` maps gender tag -> inclusive upper bound in years.

    The last tag of a schema has no bounds and catches everything above.
    """

    name: str
    upper: Mapping[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class Profile:
    id: str
    age: str
    gender: str
    condition: str


@dataclass(frozen=True)
class ProfileSchema:
    age_tags: tuple[AgeTag, ...]
    gender_tags: tuple[str, ...]
    condition_tags: tuple[str, ...]
    profiles: tuple[Profile, ...]
    age_feature: str = "Age"
    gender_feature: str = "Gender"
    condition_feature: str | None = None

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if not self.age_tags or not self.gender_tags or not self.condition_tags:
            raise DataError("profile schema needs at least one age, gender and condition tag")
        if self.condition_feature is None and len(self.condition_tags) > 1:
            raise DataError("several condition tags declared but no condition feature to read them from")
        for gender in self.gender_tags:
            previous = -math.inf
            for tag in self.age_tags[:-1]:
                if gender not in tag.upper:
                    raise DataError(f"age tag {tag.name!r} has no bound for gender {gender!r}")
                bound = float(tag.upper[gender])
                if bound <= previous:
                    raise DataError(f"age bounds for gender {gender!r} are not strictly increasing")
                previous = bound
        if self.age_tags[-1].upper:
            raise DataError(f"last age tag {self.age_tags[-1].name!r} must be unbounded")

        expected = num_profiles(self)
        combos = {(p.age, p.gender, p.condition) for p in self.profiles}
        ids = {p.id for p in self.profiles}
        if len(self.profiles) != expected or len(combos) != expected or len(ids) != expected:
            raise DataError(
                f"profile schema must list each of the {expected} tag combinations exactly once"
            )
        age_names = {t.name for t in self.age_tags}
        for p in self.profiles:
            if p.age not in age_names or p.gender not in self.gender_tags or p.condition not in self.condition_tags:
                raise DataError(f"profile {p.id!r} uses an undeclared tag")

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(p.id for p in self.profiles)


def num_profiles(schema: ProfileSchema) -> int:
    """Number of definable profiles: product of the three tag counts."""
    return len(schema.age_tags) * len(schema.gender_tags) * len(schema.condition_tags)


def _match_tag(label: str, tags: Sequence[str], what: str) -> str:
    for tag in tags:
        if tag.lower() == str(label).strip().lower():
            return tag
    raise DataError(f"no {what} tag matches {label!r}")


def age_tag(age: float, gender: str, schema: ProfileSchema) -> str:
    for tag in schema.age_tags[:-1]:
        if age <= tag.upper[gender]:
            return tag.name
    return schema.age_tags[-1].name


def assign_profile(record: RawRecord, schema: ProfileSchema) -> str:
    """Return the id of the single profile matching ``record``."""
    gender = _match_tag(record[schema.gender_feature], schema.gender_tags, "gender")
    age = float(record[schema.age_feature])
    if schema.condition_feature is None:
        condition = schema.condition_tags[0]
    else:
        condition = _match_tag(record[schema.condition_feature], schema.condition_tags, "condition")
    key = (age_tag(age, gender, schema), gender, condition)
    for p in schema.profiles:
        if (p.age, p.gender, p.condition) == key:
            return p.id
    raise DataError(f"no profile for tags {key}")


@dataclass(frozen=True)
class Cut:
    """Cut point ``const + per_year * age``."""

    const: float
    per_year: float = 0.0

    def at(self, age: float) -> float:
        return self.const + self.per_year * age

    @property
    def is_constant(self) -> bool:
        return self.per_year == 0.0


@dataclass(frozen=True)
class RangeSpec:
    """Normal range of one feature under one profile.

    By default a cut value itself is Normal (``Low`` is ``value < low``).
    ``low_closed`` puts the cut value into Low (``value <= low``), and
    ``high_closed`` puts it into High (``value >= high``).
    """

    low: Cut | None = None
    high: Cut | None = None
    low_closed: bool = False
    high_closed: bool = False

    def __post_init__(self):
        if self.low is None and self.high is None:
            raise DataError("a range needs at least one cut")
        if (
            self.low is not None
            and self.high is not None
            and self.low.is_constant
            and self.high.is_constant
            and not self.low.const < self.high.const
        ):
            raise DataError(f"low cut {self.low.const} is not below high cut {self.high.const}")

    @property
    def labels(self) -> tuple[str, ...]:
        out = []
        if self.low is not None:
            out.append(LOW)
        out.append(NORMAL)
        if self.high is not None:
            out.append(HIGH)
        return tuple(out)

    def label(self, value: float, age: float) -> str:
        if self.low is not None:
            cut = self.low.at(age)
            if value < cut or (self.low_closed and value == cut):
                return LOW
        if self.high is not None:
            cut = self.high.at(age)
            if value > cut or (self.high_closed and value == cut):
                return HIGH
        return NORMAL


@dataclass
class NormalRangeTable:
    entries: dict[tuple[str, str], RangeSpec]

    def features(self) -> list[str]:
        return sorted({f for f, _ in self.entries})

    def spec(self, feature: str, profile: str) -> RangeSpec:
        try:
            return self.entries[(feature, profile)]
        except KeyError:
            raise DataError(f"no normal range for feature {feature!r} under profile {profile!r}") from None

    def check_complete(self, features: Sequence[str], profiles: Sequence[str]) -> None:
        for f in features:
            for p in profiles:
                self.spec(f, p)


@dataclass
class DiscretizedRecord:
    profile: str
    values: dict[str, str]


def discretize_value(
    feature: str, value: float, age: float, profile: str, table: NormalRangeTable
) -> str:
    return table.spec(feature, profile).label(value, age)


def discretize_record(
    record: RawRecord,
    schema: ProfileSchema,
    table: NormalRangeTable,
    numeric_features: Sequence[str],
) -> DiscretizedRecord:
    profile = assign_profile(record, schema)
    age = float(record[schema.age_feature])
    values: dict[str, str] = {}
    for name, raw in record.items():
        if name in numeric_features:
            values[name] = discretize_value(name, float(raw), age, profile, table)
        else:
            values[name] = str(raw)
    return DiscretizedRecord(profile, values)


def discretize_dataset(
    dataset: RawDataset, schema: ProfileSchema, table: NormalRangeTable
) -> list[DiscretizedRecord]:
    numeric = [f.name for f in dataset.schema if f.is_numeric and not f.is_target]
    table.check_complete(numeric, schema.ids)
    return [discretize_record(r, schema, table, numeric) for r in dataset.records]
