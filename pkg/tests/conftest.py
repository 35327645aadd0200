import pytest

_ACCEPTANCE = []


@pytest.fixture
def criterion(request):
    """Name an acceptance criterion; its outcome is printed at the end of the session."""

    def record(name, detail=""):
        _ACCEPTANCE.append({"name": name, "detail": detail, "nodeid": request.node.nodeid})

    return record


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when == "call":
        for entry in _ACCEPTANCE:
            if entry["nodeid"] == item.nodeid:
                entry["passed"] = report.passed


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for entry in _ACCEPTANCE:
        status = "PASS" if entry.get("passed") else "FAIL"
        line = f"[{status}] {entry['name']}"
        if entry["detail"]:
            line += f"  ({entry['detail']})"
        terminalreporter.write_line(line)
