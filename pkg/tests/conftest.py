"""Shared pytest plumbing.

Tests marked @pytest.mark.acceptance(number=..., title=...) are collected
into a one-line-per-criterion PASS/FAIL summary printed after the run.
"""

import pytest

_results: dict[int, tuple[str, str, list[str]]] = {}
_extra_lines: dict[int, list[str]] = {}


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "acceptance(number, title): acceptance-criterion test"
    )


@pytest.fixture
def acceptance_report():
    """Lets a criterion test attach extra lines to the final summary."""

    def attach(number: int, line: str) -> None:
        _extra_lines.setdefault(number, []).append(line)

    return attach


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when != "call":
        return
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    number = marker.kwargs["number"]
    title = marker.kwargs["title"]
    status = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[report.outcome]
    _results[number] = (title, status, _extra_lines.get(number, []))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _results:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for number in sorted(_results):
        title, status, extra = _results[number]
        terminalreporter.write_line(f"criterion {number:2d} [{status}] {title}")
        for line in extra:
            terminalreporter.write_line(f"              {line}")
