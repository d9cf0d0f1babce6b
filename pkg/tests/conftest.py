import pytest

# Criterion label -> PASS/FAIL, filled while the acceptance module runs.
_acceptance_results: dict[str, str] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when != "call":
        return
    label = getattr(item.function, "_acceptance_label", None)
    if label:
        _acceptance_results[label] = "PASS" if report.passed else "FAIL"


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _acceptance_results:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for label in sorted(_acceptance_results):
        terminalreporter.write_line(f"{label}: {_acceptance_results[label]}")
