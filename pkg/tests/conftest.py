def pytest_terminal_summary(terminalreporter):
    lines = []
    for reports in terminalreporter.stats.values():
        for rep in reports:
            if getattr(rep, "when", None) == "call":
                lines.extend(value for key, value in rep.user_properties if key == "acceptance")
    if lines:
        terminalreporter.section("acceptance criteria")
        for text in sorted(lines):
            terminalreporter.write_line(text)
