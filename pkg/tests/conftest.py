import pytest

from cmdecomp.clgroup import build_presentation
from cmdecomp.isogwalk import load_modpolys

D971 = -971
Q971 = 1029167


@pytest.fixture(scope="session")
def pres971():
    return build_presentation(D971)


@pytest.fixture(scope="session")
def phis():
    return load_modpolys([2, 3, 5, 7])


# ---------------------------------------------------------------- acceptance summary

_criteria: dict[int, list[bool]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number n")


def pytest_collection_modifyitems(config, items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark is not None:
            item.user_properties.append(("criterion", mark.args[0]))


def pytest_runtest_logreport(report):
    crit = dict(report.user_properties).get("criterion")
    if crit is None:
        return
    if report.when == "call" or (report.when == "setup" and not report.passed):
        _criteria.setdefault(crit, []).append(report.passed)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(_criteria):
        res = _criteria[crit]
        verdict = "PASS" if all(res) else "FAIL"
        terminalreporter.write_line(
            f"criterion {crit:2d}: {verdict} ({sum(res)}/{len(res)} checks passed)")
