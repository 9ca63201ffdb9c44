import pathlib

import pytest

FIXTURES = pathlib.Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures() -> pathlib.Path:
    return FIXTURES


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "acceptance: release acceptance criteria (one test per criterion)"
    )


_OUTCOME_ORDER = {"error": 3, "failed": 2, "skipped": 1, "passed": 0}


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Print one PASS/FAIL/SKIP line per acceptance criterion."""
    by_test: dict[str, str] = {}
    for outcome in _OUTCOME_ORDER:
        for report in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(report, "nodeid", None)
            if nodeid is None or "acceptance" not in getattr(report, "keywords", {}):
                continue
            previous = by_test.get(nodeid)
            if previous is None or _OUTCOME_ORDER[outcome] > _OUTCOME_ORDER[previous]:
                by_test[nodeid] = outcome
    if not by_test:
        return
    terminalreporter.section("acceptance criteria")
    width = max(len(n.split("::")[-1]) for n in by_test)
    for nodeid in sorted(by_test):
        word = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP", "error": "FAIL"}[
            by_test[nodeid]
        ]
        name = nodeid.split("::")[-1]
        terminalreporter.write_line(f"{word:<4}  {name:<{width}}")
