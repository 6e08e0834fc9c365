import os
import sys
import time

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from hypcordic.dse import sweep  # noqa: E402

ACCEPTANCE = {}


@pytest.fixture(scope="session")
def sweeps():
    """Default 117-profile sweeps per function, computed once per session.

    ``get.elapsed[fn]`` holds the wall time of the sweep in seconds.
    """
    cache = {}

    def get(fn):
        if fn not in cache:
            t0 = time.perf_counter()
            cache[fn] = sweep(fn)
            get.elapsed[fn] = time.perf_counter() - t0
        return cache[fn]

    get.elapsed = {}
    return get


@pytest.fixture
def criterion(request):
    """Record a pass/fail line for an acceptance criterion."""
    name = request.node.get_closest_marker("criterion").args[0]
    ACCEPTANCE[request.node.nodeid] = (name, None)
    yield
    rep = getattr(request.node, "rep_call", None)
    ACCEPTANCE[request.node.nodeid] = (name, rep is not None and rep.passed)


@pytest.hookimpl(hookwrapper=True, tryfirst=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(name): acceptance criterion label")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    grouped = {}
    for nodeid, (name, ok) in ACCEPTANCE.items():
        grouped.setdefault(name, []).append((nodeid.rsplit("::", 1)[-1], ok))
    terminalreporter.section("acceptance criteria")
    for name, parts in grouped.items():
        failed = [test for test, ok in parts if not ok]
        line = f"{'FAIL' if failed else 'PASS'}  {name}"
        if failed:
            line += f"  (failing: {', '.join(failed)})"
        terminalreporter.write_line(line)
