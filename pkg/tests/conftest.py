"""Collects one pass/fail line per acceptance criterion and prints them at the end of the run."""
import pytest

_RESULTS = {}


@pytest.fixture
def detail(request):
    """Call with a short string to attach measured numbers to the criterion line."""

    def record(text):
        request.node.user_properties.append(("detail", text))

    return record


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None or report.when != "call":
        return
    number, title = marker.args
    notes = [v for k, v in item.user_properties if k == "detail"]
    prev_ok, prev_notes = _RESULTS.get(number, (True, []))
    _RESULTS[number] = (prev_ok and report.passed, prev_notes + [f"{title}: {'; '.join(notes) or '-'}"])


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        ok, notes = _RESULTS[number]
        terminalreporter.write_line(f"criterion {number:2d}  {'PASS' if ok else 'FAIL'}  " + " | ".join(notes))
