"""Reading the YAML study config: feature schema, profiles and normal ranges.

One file declares everything needed to go from a raw CSV to a binary matrix.
The ``ranges`` section may instead be a path (relative to the config file)
to a separate YAML file holding just the ranges mapping. See
``data/zalizadeh.profiles`` for a complete, commented example.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any

import yaml

from .dataset import INPUT, FeatureSchema, SchemaError, validate_schema
from .profiling import AgeTag, Cut, NormalRangeTable, Profile, ProfileSchema, RangeSpec


class _Loader(yaml.SafeLoader):
    """SafeLoader that keeps yes/no/on/off as strings; only true/false are booleans."""


_Loader.yaml_implicit_resolvers = {
    key: [(tag, rx) for tag, rx in resolvers if tag != "tag:yaml.org,2002:bool"]
    for key, resolvers in yaml.SafeLoader.yaml_implicit_resolvers.items()
}
for _first in "tTfF":
    _Loader.yaml_implicit_resolvers.setdefault(_first, []).insert(
        0, ("tag:yaml.org,2002:bool", re.compile(r"^(?:true|True|TRUE|false|False|FALSE)$"))
    )


def _read_yaml(path: Path) -> dict[str, Any]:
    if not path.is_file():
        raise FileNotFoundError(f"config file not found: {path}")
    with path.open(encoding="utf-8") as fh:
        doc = yaml.load(fh, Loader=_Loader)
    if not isinstance(doc, dict):
        raise SchemaError(f"{path}: expected a mapping at top level")
    return doc


def shipped_config_path() -> Path:
    """Path of the bundled Z-Alizadeh Sani config (schema, profiles, ranges)."""
    return Path(str(resources.files("cadpipe") / "data" / "zalizadeh.profiles"))


def _feature(entry: dict[str, Any]) -> FeatureSchema:
    try:
        name = str(entry["name"])
        kind = str(entry["kind"])
    except KeyError as exc:
        raise SchemaError(f"feature entry {entry!r} lacks {exc}") from None
    present = entry.get("present")
    return FeatureSchema(
        name=name,
        kind=kind,
        unit=entry.get("unit"),
        allowed_values=tuple(str(v) for v in entry.get("values", ())),
        role=str(entry.get("role", INPUT)),
        column=entry.get("column"),
        aliases={str(k): str(v) for k, v in (entry.get("aliases") or {}).items()},
        present=None if present is None else tuple(str(v) for v in present),
    )


def read_features(path: str | Path) -> tuple[list[FeatureSchema], list[str]]:
    """Return the validated feature schema and the list of ignored source columns."""
    doc = _read_yaml(Path(path))
    if "features" not in doc:
        raise SchemaError(f"{path}: no 'features' section")
    schema = [_feature(e) for e in doc["features"]]
    validate_schema(schema)
    ignore = [str(c) for c in doc.get("ignore_columns", ())]
    return schema, ignore


def read_profiles(path: str | Path) -> ProfileSchema:
    doc = _read_yaml(Path(path))
    try:
        sec = doc["profiles"]
        age_tags = tuple(
            AgeTag(str(t["name"]), {str(k): float(v) for k, v in (t.get("upper") or {}).items()})
            for t in sec["age_tags"]
        )
        profiles = tuple(
            Profile(str(p["id"]), str(p["age"]), str(p["gender"]), str(p["condition"]))
            for p in sec["profiles"]
        )
        return ProfileSchema(
            age_tags=age_tags,
            gender_tags=tuple(str(g) for g in sec["gender_tags"]),
            condition_tags=tuple(str(c) for c in sec["condition_tags"]),
            profiles=profiles,
            age_feature=str(sec.get("age_feature", "Age")),
            gender_feature=str(sec.get("gender_feature", "Gender")),
            condition_feature=sec.get("condition_feature"),
        )
    except KeyError as exc:
        raise SchemaError(f"{path}: profiles section lacks {exc}") from None


def _cut(raw: Any) -> Cut | None:
    if raw is None:
        return None
    if isinstance(raw, dict):
        return Cut(float(raw.get("const", 0.0)), float(raw.get("per_year", 0.0)))
    return Cut(float(raw))


def read_ranges(path: str | Path) -> NormalRangeTable:
    path = Path(path)
    doc = _read_yaml(path)
    sec = doc.get("ranges")
    if sec is None:
        raise SchemaError(f"{path}: no 'ranges' section")
    if isinstance(sec, str):
        ranges_path = (path.parent / sec).resolve()
        if not ranges_path.is_file():
            raise FileNotFoundError(f"ranges file not found: {ranges_path}")
        sec = _read_yaml(ranges_path)
        sec = sec.get("ranges", sec)
    entries: dict[tuple[str, str], RangeSpec] = {}
    for feature, rows in sec.items():
        for row in rows:
            spec = RangeSpec(
                low=_cut(row.get("low")),
                high=_cut(row.get("high")),
                low_closed=bool(row.get("low_closed", False)),
                high_closed=bool(row.get("high_closed", False)),
            )
            for profile in row["profiles"]:
                key = (str(feature), str(profile))
                if key in entries:
                    raise SchemaError(f"duplicate range for {key}")
                entries[key] = spec
    return NormalRangeTable(entries)


@dataclass
class StudyConfig:
    features: list[FeatureSchema]
    ignore_columns: list[str]
    profiles: ProfileSchema
    ranges: NormalRangeTable

    @property
    def numeric_inputs(self) -> list[str]:
        return [f.name for f in self.features if f.is_numeric and not f.is_target]


def load_config(path: str | Path | None = None) -> StudyConfig:
    """Load schema, profiles and ranges; ``None`` loads the shipped config."""
    path = shipped_config_path() if path is None else Path(path)
    features, ignore = read_features(path)
    profiles = read_profiles(path)
    ranges = read_ranges(path)
    cfg = StudyConfig(features, ignore, profiles, ranges)
    ranges.check_complete(cfg.numeric_inputs, profiles.ids)
    return cfg

