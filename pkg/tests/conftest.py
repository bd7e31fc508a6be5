import sys

import pytest

from forbidpat import load_example


@pytest.fixture
def ex():
    return load_example


def pytest_terminal_summary(terminalreporter):
    for name, mod in list(sys.modules.items()):
        if name.endswith("test_acceptance") and getattr(mod, "RESULTS", None):
            terminalreporter.section("acceptance criteria")
            for n, (ok, detail) in mod.RESULTS.items():
                line = f"criterion {n}: {'PASS' if ok else 'FAIL'}"
                terminalreporter.write_line(f"{line}  {detail}" if detail else line)
