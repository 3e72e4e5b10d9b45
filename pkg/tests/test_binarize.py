import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cadpipe.binarize import (
    BinaryMatrix,
    binarize_binominal,
    binarize_dataset,
    binarize_polynomial,
    binary_column_names,
    expand_gender,
    read_discretized,
    write_discretized,
)
from cadpipe.dataset import DataError
from cadpipe.profiling import HIGH, LOW, NORMAL, DiscretizedRecord, discretize_dataset


def feature(study, name):
    return next(f for f in study.features if f.name == name)


def test_binominal_presence(study):
    dm = feature(study, "DM")
    assert binarize_binominal(dm, "Yes") is True
    assert binarize_binominal(dm, "No") is False


def test_polynomial_normal_is_false(study):
    vhd = feature(study, "VHD")
    assert binarize_polynomial(vhd, "Normal") is False
    for v in ("mild", "moderate", "severe"):
        assert binarize_polynomial(vhd, v) is True


def test_wrong_kind_rejected(study):
    with pytest.raises(DataError):
        binarize_polynomial(feature(study, "DM"), "Yes")
    with pytest.raises(DataError):
        binarize_binominal(feature(study, "DM"), "maybe")


@pytest.mark.parametrize("label, expected", [("Male", (True, False)), ("female", (False, True))])
def test_expand_gender(label, expected):
    assert expand_gender(label) == expected


def test_expand_gender_rejects_other():
    with pytest.raises(DataError):
        expand_gender("unknown")


def test_column_names(study):
    names = binary_column_names(study.features)
    assert len(names) == 49
    assert names == sorted(names)
    assert {"Male", "Female", "Cr2", "HB2", "EF2", "Typical Chest Pain", "Region with RWMA"} <= set(names)
    assert "CAD" not in names and "Gender" not in names


def _one(study, profile, **values):
    base = {}
    for f in study.features:
        if f.is_numeric:
            base[f.name] = NORMAL
        elif f.name == "Gender":
            base[f.name] = "Male"
        else:
            base[f.name] = f.allowed_values[0]
    base.update(values)
    return DiscretizedRecord(profile, base)


@pytest.mark.parametrize("label, bit", [(LOW, True), (NORMAL, False), (HIGH, True)])
def test_numeric_label_to_bit(study, label, bit):
    m = binarize_dataset([_one(study, "p1", Cr=label)], study.features)
    assert m.column("Cr2")[0] == bit


def test_single_record_layout(study):
    rec = _one(study, "p2", Gender="Female", DM="Yes", VHD="mild", HB=LOW, CAD="Yes")
    m = binarize_dataset([rec], study.features)
    row = dict(zip(m.feature_names, m.X[0]))
    assert row["Female"] and not row["Male"]
    assert row["DM"] and row["VHD"] and row["HB2"]
    assert not row["HTN"] and not row["FBS2"]
    assert m.target.tolist() == [True]
    assert m.target_name == "CAD"


def test_cohort_matrix(cohort, study):
    disc = discretize_dataset(cohort, study.profiles, study.ranges)
    m = binarize_dataset(disc, study.features)
    assert m.X.shape == (303, 49)
    assert m.X.dtype == bool
    # exactly one gender column set per row
    assert np.array_equal(m.column("Male") ^ m.column("Female"), np.ones(303, bool))
    assert m.target.sum() == sum(r["CAD"] == "Yes" for r in cohort.records)


def test_matrix_csv_round_trip(cohort, study, tmp_path):
    m = binarize_dataset(discretize_dataset(cohort, study.profiles, study.ranges), study.features)
    m.to_csv(tmp_path / "b.csv")
    back = BinaryMatrix.from_csv(tmp_path / "b.csv")
    assert back.feature_names == m.feature_names
    assert back.target_name == "CAD"
    assert np.array_equal(back.X, m.X) and np.array_equal(back.target, m.target)
    header = (tmp_path / "b.csv").read_text().splitlines()[0].split(",")
    assert header[-1] == "CAD"


def test_from_csv_named_target(tmp_path):
    (tmp_path / "m.csv").write_text("y,a,b\n1,0,1\n0,1,1\n")
    m = BinaryMatrix.from_csv(tmp_path / "m.csv", target="y")
    assert m.feature_names == ["a", "b"]
    assert m.target.tolist() == [True, False]


@pytest.mark.parametrize("text", ["", "a,y\n", "a,y\n2,1\n", "a,y\nx,1\n"])
def test_from_csv_errors(tmp_path, text):
    (tmp_path / "m.csv").write_text(text)
    with pytest.raises(DataError):
        BinaryMatrix.from_csv(tmp_path / "m.csv")


def test_discretized_round_trip(cohort, study, tmp_path):
    disc = discretize_dataset(cohort, study.profiles, study.ranges)
    write_discretized(disc, study.features, tmp_path / "d.csv")
    back = read_discretized(tmp_path / "d.csv", study.features)
    assert back == disc


def test_select_and_rows():
    m = BinaryMatrix(["a", "b", "c"], np.eye(3, dtype=bool), [True, False, True])
    s = m.select(["c", "a"])
    assert s.X.tolist() == [[False, True], [False, False], [True, False]]
    r = m.rows([2])
    assert r.X.tolist() == [[False, False, True]] and r.target.tolist() == [True]


def test_matrix_validation():
    with pytest.raises(DataError):
        BinaryMatrix(["a"], np.zeros((2, 2)), [0, 1])
    with pytest.raises(DataError):
        BinaryMatrix(["a", "a"], np.zeros((2, 2)), [0, 1])


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 30), st.integers(1, 8), st.integers(0, 2**31 - 1))
def test_from_csv_inverts_to_csv(tmp_path_factory, n, m, seed):
    rng = np.random.default_rng(seed)
    mat = BinaryMatrix([f"c{j}" for j in range(m)], rng.random((n, m)) < 0.5, rng.random(n) < 0.5)
    p = tmp_path_factory.mktemp("bm") / "m.csv"
    mat.to_csv(p)
    back = BinaryMatrix.from_csv(p)
    assert np.array_equal(back.X, mat.X) and np.array_equal(back.target, mat.target)
