import pytest

_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(num, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or report.when != "call":
        return
    num, title = mark.args
    details = [v for k, v in item.user_properties if k == "detail"]
    _criteria[num] = (title, report.outcome, details)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_criteria):
        title, outcome, details = _criteria[num]
        status = "PASS" if outcome == "passed" else "FAIL"
        line = f"[{status}] {num:>2}. {title}"
        if details:
            line += " | " + "; ".join(details)
        terminalreporter.write_line(line)


@pytest.fixture
def detail(record_property):
    """Attach a human-readable detail string to the acceptance summary line."""

    def add(text):
        record_property("detail", text)

    return add
