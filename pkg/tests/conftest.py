import random
import sys
from pathlib import Path

import pytest
from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")

_criteria: list[tuple[str, str, str, str]] = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(id, title): acceptance criterion reported in the summary")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        status = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[rep.outcome]
        detail = "; ".join(str(v) for k, v in item.user_properties if k == "detail")
        if rep.skipped and isinstance(rep.longrepr, tuple):
            detail = rep.longrepr[2].removeprefix("Skipped: ")
        _criteria.append((mark.args[0], mark.args[1], status, detail))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for cid, title, status, detail in _criteria:
        terminalreporter.write_line(f"criterion {cid:<4} {status:<5} {title}" + (f"  [{detail}]" if detail else ""))


@pytest.fixture
def rng():
    return random.Random(20240613)


@pytest.fixture
def detail(request):
    """Attach a measurement to the acceptance summary line of this test."""
    def add(text):
        request.node.user_properties.append(("detail", text))
        print(text)
    return add
