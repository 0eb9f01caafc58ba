"""Suite-wide pytest glue.

The acceptance tests append one line per criterion to ACCEPTANCE_RESULTS;
they are echoed in a dedicated section of the terminal summary so the
pass/fail status of every criterion is visible in one place.
"""

ACCEPTANCE_RESULTS: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_RESULTS:
            terminalreporter.write_line(line)
