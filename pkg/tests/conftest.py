import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE = {}


def record(number, title, passed, detail=""):
    """Store a criterion outcome for the summary printed at the end."""
    ACCEPTANCE[number] = (title, bool(passed), detail)
    return bool(passed)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        title, ok, detail = ACCEPTANCE[k]
        line = f"{'PASS' if ok else 'FAIL'} criterion {k:2d}: {title}"
        terminalreporter.write_line(line + (f" [{detail}]" if detail else ""))
