"""Synthetic cohorts shaped like the shipped Z-Alizadeh Sani schema.

The real dataset is not redistributed with the package. These generators
produce records that satisfy the same schema (value ranges roughly follow
the published feature ranges) with a handful of features made predictive of
the target, which is enough to exercise every pipeline stage.
"""

from __future__ import annotations

import numpy as np

from .config import StudyConfig
from .dataset import RawDataset

# (min, max, decimals) per numeric feature; CAD-associated shifts are applied on top
NUMERIC_RANGES = {
    "FBS": (62, 400, 0), "Age": (30, 86, 0), "LDL": (18, 232, 0), "HDL": (15, 111, 0),
    "Cr": (0.5, 2.2, 2), "WBC": (3700, 18000, -2), "BUN": (6, 52, 0), "K": (3.0, 6.6, 1),
    "HB": (8.9, 17.6, 1), "Na": (128, 156, 0), "PLT": (25, 742, 0), "BP": (90, 190, 0),
    "PR": (50, 110, 0), "TG": (37, 1050, 0), "Neut": (32, 89, 0), "Lymph": (7, 60, 0),
    "EF": (15, 60, 0), "ESR": (1, 90, 0),
}
# fraction of the range by which CAD patients are shifted
CAD_SHIFT = {"Age": 0.18, "FBS": 0.08, "EF": -0.2, "TG": 0.05, "BP": 0.08, "HDL": -0.05}
# P(present | CAD), P(present | no CAD)
PRESENCE = {
    "Typical Chest Pain": (0.72, 0.12), "Atypical": (0.15, 0.55), "DM": (0.38, 0.15),
    "HTN": (0.68, 0.38), "Region with RWMA": (0.40, 0.08), "VHD": (0.55, 0.40),
    "Nonanginal CP": (0.02, 0.03), "T inversion": (0.35, 0.18),
}
DEFAULT_PRESENCE = (0.2, 0.2)


def make_cohort(config: StudyConfig, n_records: int = 303, seed: int = 0,
                cad_rate: float = 216 / 303) -> RawDataset:
    rng = np.random.default_rng(seed)
    cad = rng.random(n_records) < cad_rate
    records = [dict() for _ in range(n_records)]
    for f in config.features:
        if f.is_target:
            pos = [v for v in f.allowed_values if f.present and v in f.present][0]
            neg = [v for v in f.allowed_values if v != pos][0]
            for r, c in zip(records, cad):
                r[f.name] = pos if c else neg
        elif f.is_numeric:
            lo, hi, dec = NUMERIC_RANGES.get(f.name, (0.0, 1.0, 3))
            mode = lo + 0.35 * (hi - lo)
            vals = rng.triangular(lo, mode, hi, n_records)
            vals += np.where(cad, CAD_SHIFT.get(f.name, 0.0) * (hi - lo), 0.0)
            vals = np.clip(np.round(vals, dec), lo, hi)
            for r, v in zip(records, vals):
                r[f.name] = float(v)
        elif f.name == "Gender":
            male = rng.random(n_records) < np.where(cad, 0.65, 0.5)
            for r, m in zip(records, male):
                r[f.name] = "Male" if m else "Female"
        else:
            p_yes, p_no = PRESENCE.get(f.name, DEFAULT_PRESENCE)
            absent = [v for v in f.allowed_values if v.lower() in ("no", "normal")]
            present = [v for v in f.allowed_values if v not in absent]
            hit = rng.random(n_records) < np.where(cad, p_yes, p_no)
            choice = rng.integers(len(present), size=n_records)
            for r, h, c in zip(records, hit, choice):
                r[f.name] = present[c] if h else absent[0]
    return RawDataset(list(config.features), records)


def planted_matrix(n_records: int = 200, n_informative: int = 5, n_noise: int = 50,
                   flip: float = 0.05, seed: int = 0):
    """Boolean design with ``n_informative`` noisy copies of a balanced target first."""
    rng = np.random.default_rng(seed)
    y = rng.random(n_records) < 0.5
    informative = [y ^ (rng.random(n_records) < flip) for _ in range(n_informative)]
    noise = rng.random((n_records, n_noise)) < 0.5
    X = np.column_stack([*informative, noise])
    return X, y
