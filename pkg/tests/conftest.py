import sys


def pytest_terminal_summary(terminalreporter):
    # Acceptance lines are collected while output is captured and printed
    # together at the end of the session.
    lines = getattr(sys.modules.get("test_acceptance"), "LINES", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split("]")[0].split()[-1])):
            terminalreporter.write_line(line)
