import pytest

_CRITERIA = []


@pytest.fixture
def criterion(request):
    """Record one acceptance line; the test body fills in ``detail``."""
    entry = {"name": request.node.name, "detail": ""}
    yield entry
    _CRITERIA.append(entry)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when == "call":
        item.stash[_PASSED] = report.passed


_PASSED = pytest.StashKey[bool]()


def pytest_runtest_teardown(item):
    if "criterion" in getattr(item, "fixturenames", ()):
        item.config.stash.setdefault(_RESULTS, []).append(
            (item.name, item.stash.get(_PASSED, False)))


_RESULTS = pytest.StashKey[list]()


def pytest_terminal_summary(terminalreporter, config):
    results = dict(config.stash.get(_RESULTS, []))
    if not results:
        return
    details = {e["name"]: e["detail"] for e in _CRITERIA}
    terminalreporter.section("acceptance criteria")
    for name, passed in results.items():
        line = f"{'PASS' if passed else 'FAIL'}  {name}"
        if details.get(name):
            line += f"  ({details[name]})"
        terminalreporter.write_line(line)
