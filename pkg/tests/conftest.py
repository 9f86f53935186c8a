import pytest

_results = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion n")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or (report.when != "call" and report.passed):
        return
    n, title = marker.args
    entry = _results.setdefault(n, {"title": title, "passed": True, "notes": []})
    if not report.passed:
        entry["passed"] = False
    if report.when == "call":
        entry["notes"] += [f"{k}={v}" for k, v in item.user_properties]


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_results):
        r = _results[n]
        status = "PASS" if r["passed"] else "FAIL"
        notes = f"  ({', '.join(r['notes'])})" if r["notes"] else ""
        terminalreporter.write_line(f"criterion {n} {status}: {r['title']}{notes}")
