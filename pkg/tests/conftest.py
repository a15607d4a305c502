import sys


def pytest_terminal_summary(terminalreporter):
    for mod in list(sys.modules.values()):
        if getattr(mod, "__file__", "") and mod.__file__.endswith("test_acceptance.py"):
            lines = getattr(mod, "RESULTS", [])
            if lines:
                terminalreporter.section("acceptance criteria")
                for line in lines:
                    terminalreporter.write_line(line)
