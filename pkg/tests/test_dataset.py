import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cadpipe.dataset import (
    DataError,
    FeatureSchema,
    RawDataset,
    SchemaError,
    load_dataset,
    validate_schema,
    write_dataset,
)

SMALL = [
    FeatureSchema("Age", "numeric", "years"),
    FeatureSchema("DM", "binominal", allowed_values=("No", "yes")),
    FeatureSchema("VHD", "polynomial", allowed_values=("Normal", "mild", "moderate", "severe")),
    FeatureSchema("CAD", "binominal", allowed_values=("No", "Yes"), role="target"),
]


def write(tmp_path, text):
    p = tmp_path / "d.csv"
    p.write_text(text)
    return p


def test_shipped_schema_validates(study):
    validate_schema(study.features)
    inputs = [f for f in study.features if not f.is_target]
    assert len(inputs) == 48
    assert sum(f.is_numeric for f in inputs) == 18
    assert [f.name for f in study.features if f.is_target] == ["CAD"]


def test_multiple_targets_rejected():
    schema = SMALL + [FeatureSchema("Other", "binominal", allowed_values=("No", "Yes"), role="target")]
    with pytest.raises(SchemaError, match="multiple targets"):
        validate_schema(schema)


def test_duplicate_feature_rejected():
    schema = [FeatureSchema("HB", "numeric"), FeatureSchema("HB", "numeric"), SMALL[-1]]
    with pytest.raises(SchemaError, match="duplicate feature"):
        validate_schema(schema)


@pytest.mark.parametrize("feature", [
    FeatureSchema("X", "binominal", allowed_values=("a", "b", "c")),
    FeatureSchema("X", "polynomial", allowed_values=("a", "b")),
    FeatureSchema("X", "numeric", allowed_values=("a",)),
])
def test_value_count_rules(feature):
    with pytest.raises(SchemaError):
        validate_schema([feature, SMALL[-1]])


def test_no_target_rejected():
    with pytest.raises(SchemaError, match="no target"):
        validate_schema(SMALL[:-1])


def test_load_types_cells_and_keeps_order(tmp_path):
    p = write(tmp_path, "Age,DM,VHD,CAD\n40,No,mild,Yes\n61.5,YES,Normal,no\n")
    ds = load_dataset(p, SMALL)
    assert len(ds) == 2
    assert ds.records[0] == {"Age": 40.0, "DM": "No", "VHD": "mild", "CAD": "Yes"}
    # value matching ignores case and returns the canonical label
    assert ds.records[1]["DM"] == "yes"
    assert ds.records[1]["CAD"] == "No"


def test_header_only_is_empty_dataset(tmp_path):
    with pytest.raises(DataError, match="empty dataset"):
        load_dataset(write(tmp_path, "Age,DM,VHD,CAD\n"), SMALL)


def test_empty_file(tmp_path):
    with pytest.raises(DataError, match="empty file"):
        load_dataset(write(tmp_path, ""), SMALL)


def test_bad_category_names_row_column_value(tmp_path):
    p = write(tmp_path, "Age,DM,VHD,CAD\n40,No,mild,Yes\n50,maybe,mild,Yes\n")
    with pytest.raises(DataError) as info:
        load_dataset(p, SMALL)
    msg = str(info.value)
    assert "row 3" in msg and "'DM'" in msg and "'maybe'" in msg


def test_unparseable_number(tmp_path):
    with pytest.raises(DataError, match=r"row 2, column 'Age'"):
        load_dataset(write(tmp_path, "Age,DM,VHD,CAD\nforty,No,mild,Yes\n"), SMALL)


@pytest.mark.parametrize("text", ["Age,DM,VHD\n1,No,mild\n", "Age,DM,VHD,CAD,Extra\n1,No,mild,Yes,0\n"])
def test_column_mismatch(tmp_path, text):
    with pytest.raises(DataError, match="column"):
        load_dataset(write(tmp_path, text), SMALL)


def test_column_names_are_case_sensitive(tmp_path):
    with pytest.raises(DataError, match="missing column"):
        load_dataset(write(tmp_path, "age,DM,VHD,CAD\n40,No,mild,Yes\n"), SMALL)


def test_missing_value_is_an_error(tmp_path):
    with pytest.raises(DataError, match="missing value"):
        load_dataset(write(tmp_path, "Age,DM,VHD,CAD\n40,,mild,Yes\n"), SMALL)


def test_source_headers_aliases_and_ignored_columns(study, tmp_path):
    # a raw-export style header: Sex/Fmale, 0/1 codes, Cath target, extra BMI column
    raw_names = []
    for f in study.features:
        raw_names.append(f.column or f.name)
    row = []
    for f in study.features:
        if f.is_numeric:
            row.append("50")
        elif f.name == "Gender":
            row.append("Fmale")
        elif f.is_target:
            row.append("Cad")
        elif f.allowed_values[0] == "No":
            row.append("1")
        else:
            row.append("N" if f.name == "VHD" else "0")
    p = write(tmp_path, ",".join(raw_names + ["BMI"]) + "\n" + ",".join(row + ["27.1"]) + "\n")
    ds = load_dataset(p, study.features, study.ignore_columns)
    rec = ds.records[0]
    assert rec["Gender"] == "Female"
    assert rec["CAD"] == "Yes"
    assert rec["DM"] == "Yes"
    assert rec["VHD"] == "Normal"
    assert rec["Function class"] == "Normal"


label = st.sampled_from
record = st.fixed_dictionaries({
    "Age": st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False),
    "DM": label(["No", "yes"]),
    "VHD": label(["Normal", "mild", "moderate", "severe"]),
    "CAD": label(["No", "Yes"]),
})


@settings(max_examples=50, deadline=None)
@given(st.lists(record, min_size=1, max_size=20))
def test_write_load_round_trip(tmp_path_factory, records):
    path = tmp_path_factory.mktemp("rt") / "d.csv"
    ds = RawDataset(SMALL, records)
    write_dataset(ds, path)
    back = load_dataset(path, SMALL)
    assert back.records == ds.records


def test_cohort_round_trip(cohort, study, tmp_path):
    write_dataset(cohort, tmp_path / "c.csv")
    assert load_dataset(tmp_path / "c.csv", study.features).records == cohort.records
