import os

import numpy as np
import pytest

# keep sweeps in-process by default; the determinism check sets its own
os.environ.setdefault("TRUSTCOOP_THREADS", "1")

_VERDICTS = []


@pytest.fixture
def verdict():
    """Record one acceptance line; it is echoed and repeated in the summary."""

    def record(number, title, ok, detail):
        line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
        _VERDICTS.append((number, line))
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(_VERDICTS):
        terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
