import pathlib

import pytest

from icid import parse_graph

FIXTURES = pathlib.Path(__file__).parent / "fixtures"


def fixture_text(name: str) -> str:
    return (FIXTURES / name).read_text()


@pytest.fixture
def load_graph():
    def _load(name: str):
        return parse_graph(fixture_text(f"{name}.scm"))

    return _load
