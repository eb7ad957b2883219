import functools
import json
import os

import pytest
from hypothesis import settings

from mhalgebroid.cli import load_model

FIXDIR = os.path.join(os.path.dirname(__file__), "..", "fixtures")

GROUPOID_FIXTURES = ["trivial", "z2_group", "z3_group", "pair2", "pair2_weighted", "pair3", "z2_pair2"]
CROSSED_FIXTURES = ["swap_crossed"]
ALL_FIXTURES = GROUPOID_FIXTURES + CROSSED_FIXTURES

settings.register_profile("default", deadline=None, max_examples=25)
settings.load_profile("default")


def fixture_path(name):
    return os.path.join(FIXDIR, name + ".json")


def read_doc(name):
    with open(fixture_path(name)) as fh:
        return json.load(fh)


def model(name, scalars=None):
    return load_model(read_doc(name), name, scalars)


@functools.lru_cache(maxsize=None)
def pipeline(name, scalars=None):
    """Full construction, verification and duality run, shared across test modules."""
    return model(name, scalars).run(dual=True, bidual=True)


@pytest.fixture(params=ALL_FIXTURES)
def fixture_name(request):
    return request.param


@pytest.fixture(params=GROUPOID_FIXTURES)
def groupoid_name(request):
    return request.param


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import CRITERIA
    except ImportError:
        return
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, ok, note in sorted(CRITERIA):
        line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {title}"
        terminalreporter.write_line(line + (f"  [{note}]" if note else ""))
