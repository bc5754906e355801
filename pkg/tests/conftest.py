import time

import pytest
from hypothesis import settings

# numba kernels compile (or load from cache) on first use
settings.register_profile("klab", deadline=None)
settings.load_profile("klab")

_RESULTS = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_call(item):
    start = time.perf_counter()
    outcome = yield
    mark = item.get_closest_marker("criterion")
    if mark is not None:
        number, title = mark.args
        _RESULTS[number] = (title, outcome.excinfo is None, time.perf_counter() - start)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        title, ok, secs = _RESULTS[number]
        terminalreporter.write_line(f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}  ({secs:.1f} s)")
