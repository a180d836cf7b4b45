import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

_CRITERIA: dict[str, str] = {}


def pytest_addoption(parser):
    parser.addoption("--slow", action="store_true", default=False,
                     help="run long computations (symbolic n=4 gram determinant, full-size lattices)")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running; needs --slow")
    config.addinivalue_line("markers", "criterion(label): acceptance criterion reported in the summary")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--slow"):
        return
    skip = pytest.mark.skip(reason="needs --slow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    label = mark.args[0]
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        status = "SKIP" if report.skipped else ("PASS" if report.passed else "FAIL")
        # a criterion spanning several tests reports its worst run outcome
        rank = {"SKIP": 0, "PASS": 1, "FAIL": 2}
        if rank[status] >= rank.get(_CRITERIA.get(label), -1):
            _CRITERIA[label] = status


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(_CRITERIA, key=lambda s: (int(s.split(".")[0]), s)):
        terminalreporter.write_line(f"{_CRITERIA[label]:4s}  {label}")
