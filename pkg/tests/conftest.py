"""Shared pytest wiring: print the acceptance verdict lines after the run.

test_acceptance.py appends one line per criterion to its RESULTS list; those
lines would normally vanish into captured stdout, so we echo them in the
terminal summary where they survive any capture mode.
"""

import sys


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None) if mod else None
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
