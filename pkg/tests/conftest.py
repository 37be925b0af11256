import sys
from functools import lru_cache
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from heckecross.scenario import from_spec, load_fixture  # noqa: E402


@lru_cache(maxsize=None)
def fixture(name):
    return load_fixture(name)


@lru_cache(maxsize=None)
def system(name):
    return fixture(name).system


GOOD = ("point_s3", "point_s4", "normal_s3a3", "trivial_action", "transf_s3", "transf_s3_dims2", "pair4_s4")
SMALL = ("point_s3", "normal_s3a3", "trivial_action", "transf_s3")


def scenario_spec(group, gamma, groupoid, action, dims=1, **extra):
    spec = {"schema": 1, "group": group, "gamma": gamma, "groupoid": groupoid, "action": action, "bundle": {"dims": dims}}
    spec.update(extra)
    return spec


@pytest.fixture
def build():
    return lambda spec: from_spec(spec)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.report_lines():
        terminalreporter.write_line(line)
