import sys
import time
from pathlib import Path

import pytest
from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

from lsign import gl2  # noqa: E402

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

_CRITERIA: list[str] = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, text): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or rep.when != "call":
        return
    number, text = marker.args
    _CRITERIA.append(f"criterion {number}: {'PASS' if rep.passed else 'FAIL'} - {text}")


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_CRITERIA, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def delta_1e4():
    return gl2.delta_q_expansion(10**4)


@pytest.fixture(scope="session")
def delta_1e6():
    t0 = time.perf_counter()
    f = gl2.delta_q_expansion(10**6)
    return f, time.perf_counter() - t0
