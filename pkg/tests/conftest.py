"""Terminal reporting for the acceptance criteria.

Each test named test_criterion_* contributes one PASS/FAIL line to a
summary section at the end of the run, carrying the measured values it
recorded via the `criterion` fixture.
"""

import pytest

_LINES: list[str] = []


@pytest.fixture
def criterion(request):
    """Callable the test uses to attach its measured-detail text."""

    def set_detail(text: str) -> None:
        request.node._criterion_detail = text

    return set_detail


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when != "call" or not item.name.startswith("test_criterion_"):
        return
    verdict = "PASS" if report.passed else "FAIL"
    detail = getattr(item, "_criterion_detail", "")
    suffix = f" - {detail}" if detail else ""
    _LINES.append(f"{item.name}: {verdict}{suffix}")


def pytest_terminal_summary(terminalreporter):
    if not _LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in _LINES:
        terminalreporter.write_line(line)
