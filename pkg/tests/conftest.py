import sys

import pytest

from qcharlier.qcore import QParams

GRID = [(q, a) for q in (0.3, 0.5, 0.7) for a in (0.3, 1.0, 2.5)]


@pytest.fixture(params=GRID, ids=lambda qa: f"q{qa[0]}-a{qa[1]}")
def params(request):
    return QParams(*request.param)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split("[")[1].split("]")[0])):
            terminalreporter.write_line(line)
