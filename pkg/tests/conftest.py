import sys


def pytest_terminal_summary(terminalreporter):
    module = next((m for name, m in sys.modules.items() if name.endswith("test_acceptance")), None)
    results = getattr(module, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(results):
        terminalreporter.write_line(results[num])
    missing = [n for n in range(1, 14) if n not in results]
    if missing:
        terminalreporter.write_line(f"not run: criteria {missing}")
