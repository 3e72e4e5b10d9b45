import pytest
from hypothesis import given
from hypothesis import strategies as st

from cadpipe.dataset import DataError
from cadpipe.profiling import (
    HIGH,
    LABEL_ORDER,
    LOW,
    NORMAL,
    AgeTag,
    Cut,
    Profile,
    ProfileSchema,
    RangeSpec,
    assign_profile,
    discretize_dataset,
    discretize_record,
    discretize_value,
    num_profiles,
)

ALL = ("p1", "p2", "p3", "p4")
MEN = ("p1", "p3")
WOMEN = ("p2", "p4")
# a representative age per profile; used for the age-dependent ESR cut
AGE = {"p1": 40, "p2": 50, "p3": 70, "p4": 60}


def _schema(n_age, n_gender, n_cond):
    genders = tuple(f"g{i}" for i in range(n_gender))
    ages = tuple(AgeTag(f"a{i}", {g: 10.0 * (i + 1) for g in genders}) for i in range(n_age - 1))
    ages += (AgeTag(f"a{n_age - 1}"),)
    conds = tuple(f"c{i}" for i in range(n_cond))
    profiles = []
    for a in ages:
        for g in genders:
            for c in conds:
                profiles.append(Profile(f"{a.name}{g}{c}", a.name, g, c))
    return ProfileSchema(ages, genders, conds, tuple(profiles),
                         condition_feature=None if n_cond == 1 else "Cond")


def test_shipped_schema_has_four_profiles(study):
    assert num_profiles(study.profiles) == 4


@pytest.mark.parametrize("shape, expected", [((1, 1, 1), 1), ((3, 2, 2), 12), ((2, 2, 1), 4)])
def test_num_profiles(shape, expected):
    assert num_profiles(_schema(*shape)) == expected


def test_incomplete_profile_list_rejected(study):
    s = study.profiles
    with pytest.raises(DataError):
        ProfileSchema(s.age_tags, s.gender_tags, s.condition_tags, s.profiles[:3])


def test_age_bounds_must_increase():
    ages = (AgeTag("young", {"M": 40}), AgeTag("mid", {"M": 30}), AgeTag("old"))
    profiles = tuple(Profile(t.name, t.name, "M", "n") for t in ages)
    with pytest.raises(DataError, match="strictly increasing"):
        ProfileSchema(ages, ("M",), ("n",), profiles)


@pytest.mark.parametrize("gender, age, expected", [
    ("Male", 40, "p1"),
    ("Male", 45, "p1"),
    ("Male", 45.5, "p3"),
    ("Female", 55, "p2"),
    ("Female", 60, "p4"),
    ("female", 30, "p2"),
])
def test_assign_profile(study, gender, age, expected):
    assert assign_profile({"Age": age, "Gender": gender, "HB": 1.0}, study.profiles) == expected


def test_assign_profile_with_condition_axis():
    s = _schema(2, 1, 2)
    assert assign_profile({"Age": 5, "Gender": "g0", "Cond": "C1"}, s) == "a0g0c1"
    with pytest.raises(DataError):
        assign_profile({"Age": 5, "Gender": "g0", "Cond": "pregnant"}, s)


@given(st.floats(0, 120), st.sampled_from(["Male", "Female"]), st.dictionaries(st.text(), st.integers()))
def test_profile_ignores_other_features(study, age, gender, extra):
    record = dict(extra)
    record.update({"Age": age, "Gender": gender})
    assert assign_profile(record, study.profiles) == assign_profile({"Age": age, "Gender": gender}, study.profiles)


# (feature, profiles, value, expected label): both sides of every cut of every range row
RANGE_CASES_BY_ROW = [
    ("FBS", ALL, 59.9, LOW), ("FBS", ALL, 60, NORMAL), ("FBS", ALL, 99, NORMAL), ("FBS", ALL, 99.1, HIGH),
    ("Age", MEN, 45, NORMAL), ("Age", MEN, 45.1, HIGH), ("Age", MEN, 1, NORMAL),
    ("Age", WOMEN, 55, NORMAL), ("Age", WOMEN, 55.1, HIGH), ("Age", WOMEN, 1, NORMAL),
    ("Cr", MEN, 0.74, LOW), ("Cr", MEN, 0.75, NORMAL), ("Cr", MEN, 1.2, NORMAL), ("Cr", MEN, 1.21, HIGH),
    ("Cr", WOMEN, 0.64, LOW), ("Cr", WOMEN, 0.65, NORMAL), ("Cr", WOMEN, 1.0, NORMAL), ("Cr", WOMEN, 1.01, HIGH),
    ("LDL", ALL, 130, NORMAL), ("LDL", ALL, 130.1, HIGH), ("LDL", ALL, 0, NORMAL),
    ("HDL", ALL, 39.9, LOW), ("HDL", ALL, 40, NORMAL), ("HDL", ALL, 500, NORMAL),
    ("WBC", ALL, 3999, LOW), ("WBC", ALL, 4000, NORMAL), ("WBC", ALL, 10000, NORMAL), ("WBC", ALL, 10001, HIGH),
    ("BUN", ALL, 7.9, LOW), ("BUN", ALL, 8, NORMAL), ("BUN", ALL, 21, NORMAL), ("BUN", ALL, 21.1, HIGH),
    ("HB", MEN, 13.4, LOW), ("HB", MEN, 13.5, NORMAL), ("HB", MEN, 17.5, NORMAL), ("HB", MEN, 17.6, HIGH),
    ("HB", WOMEN, 11.9, LOW), ("HB", WOMEN, 12, NORMAL), ("HB", WOMEN, 16, NORMAL), ("HB", WOMEN, 16.1, HIGH),
    ("K", ALL, 3.39, LOW), ("K", ALL, 3.4, NORMAL), ("K", ALL, 5.3, NORMAL), ("K", ALL, 5.31, HIGH),
    ("Na", ALL, 136.9, LOW), ("Na", ALL, 137, NORMAL), ("Na", ALL, 147, NORMAL), ("Na", ALL, 147.1, HIGH),
    ("PLT", ALL, 149, LOW), ("PLT", ALL, 150, NORMAL), ("PLT", ALL, 399, NORMAL), ("PLT", ALL, 400, HIGH),
    ("BP", ALL, 89, LOW), ("BP", ALL, 90, NORMAL), ("BP", ALL, 140, NORMAL), ("BP", ALL, 141, HIGH),
    ("PR", ALL, 59, LOW), ("PR", ALL, 60, NORMAL), ("PR", ALL, 100, NORMAL), ("PR", ALL, 101, HIGH),
    ("TG", ALL, 200, NORMAL), ("TG", ALL, 200.5, HIGH), ("TG", ALL, 1, NORMAL),
    ("Neut", ALL, 45.9, LOW), ("Neut", ALL, 46, NORMAL), ("Neut", ALL, 78, NORMAL), ("Neut", ALL, 78.1, HIGH),
    ("Lymph", ALL, 17.9, LOW), ("Lymph", ALL, 18, NORMAL), ("Lymph", ALL, 52, NORMAL), ("Lymph", ALL, 52.1, HIGH),
    ("EF", ALL, 50, LOW), ("EF", ALL, 50.1, NORMAL), ("EF", ALL, 100, NORMAL),
]
CASES = [(f, p, v, lab) for f, profiles, v, lab in RANGE_CASES_BY_ROW for p in profiles]


@pytest.mark.parametrize("feature, profile, value, expected", CASES)
def test_range_boundaries(study, feature, profile, value, expected):
    assert discretize_value(feature, value, AGE[profile], profile, study.ranges) == expected


# ESR Normal is "<= age/2" for men and "<= age/2 + 5" for women
@pytest.mark.parametrize("profile, age, normal_max", [
    ("p1", 40, 20), ("p3", 70, 35), ("p2", 50, 30), ("p4", 60, 35),
])
def test_esr_age_formula(study, profile, age, normal_max):
    assert discretize_value("ESR", normal_max, age, profile, study.ranges) == NORMAL
    assert discretize_value("ESR", normal_max + 0.1, age, profile, study.ranges) == HIGH
    assert discretize_value("ESR", 0, age, profile, study.ranges) == NORMAL


def test_same_value_differs_by_profile(study):
    r = study.ranges
    assert discretize_value("HB", 12.5, 40, "p1", r) == LOW
    assert discretize_value("HB", 12.5, 40, "p2", r) == NORMAL
    assert discretize_value("Cr", 1.1, 40, "p1", r) == NORMAL
    assert discretize_value("Cr", 1.1, 40, "p2", r) == HIGH
    assert discretize_value("ESR", 30, 70, "p3", r) == NORMAL
    assert discretize_value("ESR", 30, 50, "p3", r) == HIGH


def test_missing_range_is_an_error(study):
    with pytest.raises(DataError, match="no normal range"):
        discretize_value("Chol", 1.0, 40, "p1", study.ranges)


def _base_record(study, **overrides):
    mid = {  # a value inside every normal band
        "FBS": 80, "Age": 40, "LDL": 100, "HDL": 50, "Cr": 0.9, "WBC": 7000, "BUN": 15, "K": 4.2,
        "HB": 14.0, "Na": 140, "PLT": 250, "BP": 120, "PR": 75, "TG": 150, "Neut": 60, "Lymph": 30,
        "EF": 55, "ESR": 10,
    }
    rec = {}
    for f in study.features:
        if f.is_numeric:
            rec[f.name] = float(mid[f.name])
        else:
            rec[f.name] = "Male" if f.name == "Gender" else f.allowed_values[0]
    rec.update(overrides)
    return rec


def test_discretize_record_all_normal(study):
    out = discretize_record(_base_record(study), study.profiles, study.ranges, study.numeric_inputs)
    assert out.profile == "p1"
    assert all(out.values[n] == NORMAL for n in study.numeric_inputs)
    assert out.values["DM"] == "No"


def test_discretize_record_examples(study):
    out = discretize_record(_base_record(study, HB=14.0, Cr=1.0), study.profiles, study.ranges,
                            study.numeric_inputs)
    assert (out.values["HB"], out.values["Cr"]) == (NORMAL, NORMAL)
    out = discretize_record(_base_record(study, Gender="Female", Age=60.0, FBS=150.0),
                            study.profiles, study.ranges, study.numeric_inputs)
    assert out.profile == "p4"
    assert out.values["FBS"] == HIGH


def test_discretize_dataset_covers_every_numeric(cohort, study):
    out = discretize_dataset(cohort, study.profiles, study.ranges)
    assert len(out) == len(cohort)
    for rec in out:
        assert {rec.values[n] for n in study.numeric_inputs} <= set(LABEL_ORDER)


cuts = st.one_of(st.none(), st.floats(-100, 100))


@given(cuts, cuts, st.booleans(), st.booleans(), st.floats(-1e3, 1e3), st.floats(-1e3, 1e3),
       st.floats(0, 100))
def test_labels_total_and_monotone(low, high, low_closed, high_closed, a, b, age):
    if low is None and high is None:
        return
    if low is not None and high is not None and not low < high:
        return
    spec = RangeSpec(None if low is None else Cut(low), None if high is None else Cut(high),
                     low_closed, high_closed)
    la, lb = spec.label(a, age), spec.label(b, age)
    assert la in spec.labels and lb in spec.labels
    if a <= b:
        assert LABEL_ORDER[la] <= LABEL_ORDER[lb]


def test_inverted_cuts_rejected():
    with pytest.raises(DataError):
        RangeSpec(Cut(5), Cut(3))
