"""Shared pytest hooks: per-criterion verdict lines for the acceptance
suite, printed after the run so the gate is auditable at a glance."""

import pytest

_verdicts: dict[int, bool] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    criterion = marker.args[0]
    if report.when == "call":
        passed = report.passed and _verdicts.get(criterion, True)
        _verdicts[criterion] = passed
    elif report.failed:
        _verdicts[criterion] = False


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _verdicts:
        return
    terminalreporter.section("acceptance criteria")
    for criterion in sorted(_verdicts):
        verdict = "PASS" if _verdicts[criterion] else "FAIL"
        terminalreporter.write_line(
            f"acceptance criterion {criterion}: {verdict}"
        )
