import pytest

from charpath.dirichlet import build_context

_CRITERIA: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or report.when != "call" and not report.failed:
        return
    number, title = mark.args
    prev = _CRITERIA.get(number, (title, "PASS"))[1]
    status = "FAIL" if report.failed or prev == "FAIL" else "PASS"
    _CRITERIA[number] = (title, status)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, status = _CRITERIA[number]
        terminalreporter.write_line(f"criterion {number:>2} {status}: {title}")


@pytest.fixture(scope="session")
def ctx5():
    return build_context(5)


@pytest.fixture(scope="session")
def ctx7():
    return build_context(7)


@pytest.fixture(scope="session")
def ctx101():
    return build_context(101)


@pytest.fixture(scope="session")
def ctx1009():
    return build_context(1009)


@pytest.fixture(scope="session")
def ctx10007():
    return build_context(10007)
