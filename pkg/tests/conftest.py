"""Shared pytest hooks.

The acceptance tests append one verdict line each; reprinting them in
the terminal summary keeps the gate visible in a plain ``pytest -v``
run, where per-test stdout is otherwise captured.
"""

acceptance_lines: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if acceptance_lines:
        terminalreporter.ensure_newline()
        terminalreporter.section("acceptance criteria")
        for line in acceptance_lines:
            terminalreporter.write_line(line)
