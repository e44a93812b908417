from __future__ import annotations

import sys


def pytest_terminal_summary(terminalreporter):
    """One pass/fail line per acceptance criterion, when they ran."""
    module = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    results = getattr(module, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(results):
        terminalreporter.write_line(f"criterion {k}: {'pass' if results[k] else 'fail'}")
