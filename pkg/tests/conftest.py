import math

import numpy as np
import pytest

from molgate.feasibility import r_min
from molgate.molecules import lookup
from molgate.rotor import LevelLabel


@pytest.fixture(scope="session")
def nacs():
    return lookup("NaCs")


@pytest.fixture(scope="session")
def krb():
    return lookup("KRb")


@pytest.fixture(scope="session")
def r_gate(nacs):
    """The end-to-end working point r = 2 r_min for NaCs."""
    return 2 * r_min(nacs)


PLUS = {LevelLabel(0, 1): 1 / math.sqrt(2), LevelLabel(1, 1): 1 / math.sqrt(2)}


def random_unit_complex(rng, n):
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    return v / np.linalg.norm(v)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion checked by this test")
    config._criteria = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when != "call" and not rep.failed:
        return
    number, title = mark.args
    prev = item.config._criteria.get(number, (title, True))
    item.config._criteria[number] = (title, prev[1] and rep.passed)


def pytest_terminal_summary(terminalreporter, config):
    if not config._criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(config._criteria):
        title, ok = config._criteria[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}")
