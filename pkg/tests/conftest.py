ACCEPTANCE_MODULE = "test_acceptance"

_results = []


def pytest_runtest_logreport(report):
    if report.when == "call" and ACCEPTANCE_MODULE in report.nodeid:
        name = report.nodeid.split("::")[-1].replace("test_", "").replace("_", " ")
        _results.append((name, report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.write_line("")
    terminalreporter.write_line("acceptance criteria:")
    for name, outcome in _results:
        mark = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"  [{mark}] {name}")
