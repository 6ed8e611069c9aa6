"""Collects acceptance-test outcomes and prints one line per criterion."""

import pytest

_RESULTS: dict[int, dict] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None or report.when not in ("setup", "call"):
        return
    number, title = marker.args
    entry = _RESULTS.setdefault(number, {"title": title, "ok": True, "failed": []})
    if report.failed:
        entry["ok"] = False
        entry["failed"].append(item.name)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        entry = _RESULTS[number]
        status = "PASS" if entry["ok"] else "FAIL"
        line = f"AC{number:<2} {status}  {entry['title']}"
        if entry["failed"]:
            line += f"  [failed: {', '.join(entry['failed'])}]"
        terminalreporter.write_line(line)
