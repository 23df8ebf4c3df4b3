import copy
from pathlib import Path

import pytest

from easepatch.json_model import load_file

FIXTURES = Path(__file__).parent / "fixtures"

USERS_PATCH_TEXT = """[{"op":"replace", "path":"users/0/name",
  "value": "John"},
 {"op":"add","path":"users/1",
  "value": {"name":"Sam"}}]"""


@pytest.fixture
def fixtures_dir():
    return FIXTURES


@pytest.fixture
def users_patch_text():
    return USERS_PATCH_TEXT


@pytest.fixture
def users_doc():
    return {"users": [{"name": "Ann"}]}


@pytest.fixture
def roster():
    return {"users": [{"name": "Alice"}, {"name": "Bob"}, {"name": "Tom"}]}


@pytest.fixture
def scene():
    return load_file(FIXTURES / "scene.json")


@pytest.fixture
def frozen():
    """Deep-copies a value so a test can later check it was not mutated."""
    return copy.deepcopy


# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE_RESULTS: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_RESULTS):
        terminalreporter.write_line(ACCEPTANCE_RESULTS[n])
