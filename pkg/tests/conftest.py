import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

from hiertype.ontology import build_tree, parse_ontology  # noqa: E402

# fixed example generation so repeated runs see the same cases
settings.register_profile("repro", derandomize=True)
settings.load_profile("repro")

FIGER_LIKE = [
    "/person/artist/singer",
    "/person/artist/actor",
    "/person/doctor",
    "/location/city",
    "/location",
    "/organization",
]


@pytest.fixture
def figer_lines():
    return list(FIGER_LIKE)


@pytest.fixture
def tree():
    return parse_ontology(FIGER_LIKE)


@pytest.fixture
def xtree():
    return build_tree(FIGER_LIKE, "exclusive")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
