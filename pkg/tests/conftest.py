import re
from collections import defaultdict

_results = defaultdict(lambda: {"passed": 0, "failed": 0})
_PATTERN = re.compile(r"test_acceptance\.py::test_(c\d\d)_([A-Za-z0-9_]+?)(?:\[.*)?$")


def pytest_runtest_logreport(report):
    if report.when == "call" or (report.when == "setup" and report.failed):
        match = _PATTERN.search(report.nodeid)
        if not match:
            return
        key = (match.group(1), match.group(2))
        if report.passed:
            _results[key]["passed"] += 1
        elif report.failed:
            _results[key]["failed"] += 1


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for (code, name), counts in sorted(_results.items()):
        if counts["failed"]:
            line = f"  {code} {name}: FAIL ({counts['passed']} ok, {counts['failed']} failing)"
        else:
            line = f"  {code} {name}: PASS ({counts['passed']} ok)"
        terminalreporter.write_line(line)
