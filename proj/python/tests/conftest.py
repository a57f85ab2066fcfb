import json
import pathlib

import pytest

ROOT = pathlib.Path(__file__).resolve().parents[2]


@pytest.fixture(scope="session")
def report_schema():
    return json.loads((ROOT / "docs" / "report_schema.json").read_text())


@pytest.fixture(scope="session")
def configs_dir():
    return ROOT / "configs"
