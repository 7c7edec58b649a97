import os
import sys
from collections import defaultdict

import pytest
from hypothesis import settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", deadline=None, max_examples=100)
settings.register_profile("ci", deadline=None, max_examples=300)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

_criteria: dict[int, list[tuple[str, str]]] = defaultdict(list)
_titles: dict[int, str] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    n, title = mark.args
    _titles[n] = title
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        _criteria[n].append((item.name, rep.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        parts = _criteria[n]
        ok = all(o == "passed" for _, o in parts)
        red = [name for name, o in parts if o != "passed"]
        line = f"criterion {n:2d} {'PASS' if ok else 'FAIL'}  {_titles[n]}"
        if red:
            line += "  [red: " + ", ".join(red) + "]"
        terminalreporter.write_line(line)
