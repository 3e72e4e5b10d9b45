import os
from pathlib import Path

import pytest

from cadpipe.config import load_config, shipped_config_path
from cadpipe.synthetic import make_cohort

HERE = Path(__file__).parent


def zalizadeh_csv() -> Path | None:
    """Location of a CSV export of the real Z-Alizadeh Sani data, if available.

    Set CADPIPE_ZALIZADEH_CSV or drop the file at tests/data/zalizadeh.csv.
    """
    env = os.environ.get("CADPIPE_ZALIZADEH_CSV")
    for candidate in (env, HERE / "data" / "zalizadeh.csv"):
        if candidate and Path(candidate).is_file():
            return Path(candidate)
    return None


@pytest.fixture(scope="session")
def study():
    return load_config()


@pytest.fixture(scope="session")
def config_path():
    return shipped_config_path()


@pytest.fixture(scope="session")
def cohort(study):
    return make_cohort(study, 303, seed=7)


@pytest.fixture(scope="session")
def real_csv():
    path = zalizadeh_csv()
    if path is None:
        pytest.skip("Z-Alizadeh Sani CSV not found: set CADPIPE_ZALIZADEH_CSV to run this check")
    return path
