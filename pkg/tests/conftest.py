"""Shared pytest plumbing: collects acceptance-criterion verdict lines and
reprints them in the terminal summary so they are visible even when the
owning test passes (pytest hides captured stdout of passing tests)."""

ACCEPTANCE_LINES: list[str] = []


def record_acceptance(line: str) -> None:
    ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
