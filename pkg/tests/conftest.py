import pathlib

import pytest

FIXTURES = pathlib.Path(__file__).parent / "fixtures"
GOLDEN = pathlib.Path(__file__).parent / "golden"


@pytest.fixture
def fixtures():
    return FIXTURES


@pytest.fixture
def golden():
    return GOLDEN


def read_fixture(name):
    return (FIXTURES / name).read_text(encoding="utf-8")
