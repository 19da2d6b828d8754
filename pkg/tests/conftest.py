"""Collect the acceptance tests' per-criterion summary lines.

test_acceptance.py prints one ``criterion N: PASS/FAIL - ...`` line per
claim; this hook gathers them from the captured output and repeats them
in a terminal section at the end of the run, so the one-line verdicts
are visible without ``-rA``.
"""


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = set()
    for reports in terminalreporter.stats.values():
        for report in reports:
            if getattr(report, "when", None) != "call":
                continue
            for line in getattr(report, "capstdout", "").splitlines():
                if line.startswith("criterion "):
                    lines.add(line)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
