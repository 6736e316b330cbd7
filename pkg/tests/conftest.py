import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from cstarmod import BlockAlgebra, ModuleSpace
from cstarmod.instances import trial_rng

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

FAMILIES = [(1,), (2,), (1, 1), (1, 2), (2, 3)]


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def space(dims, k):
    return ModuleSpace(BlockAlgebra(tuple(dims)), k)


def seeded(seed):
    return trial_rng(seed, 0)


def cmat(rng, m, n):
    return rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))


# -- acceptance reporting: one line per criterion in the terminal summary -------

_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, text): acceptance criterion covered by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when != "call" and not rep.failed:
        return
    key = mark.args[0]
    ok = rep.passed
    prev = _CRITERIA.get(key)
    _CRITERIA[key] = (mark.args[1], ok if prev is None else prev[1] and ok)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")

    def order(k):
        digits = "".join(c for c in str(k) if c.isdigit())
        return (int(digits) if digits else 99, str(k))

    for key in sorted(_CRITERIA, key=order):
        text, ok = _CRITERIA[key]
        terminalreporter.write_line(f"criterion {key:>3}: {'PASS' if ok else 'FAIL'}  {text}")
