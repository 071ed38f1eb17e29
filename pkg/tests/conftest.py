import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from corrgeo import linalg  # noqa: E402
from corrgeo.states import bell_diagonal, random_state  # noqa: E402

LOG2_27_12 = float(np.log2(27.0 / 12.0))


@pytest.fixture(scope="session")
def two_qubit_states():
    """The 200 seeded random two-qubit states shared by the property suites."""
    return [random_state((2, 2), seed=1000 + k) for k in range(200)]


@pytest.fixture
def bell07():
    return bell_diagonal([0.7, 0.1, 0.1, 0.1])


def h(x):
    return linalg.binary_entropy(x)


ACCEPTANCE_LINES = []


def report_criterion(number, ok, detail):
    """Print and record one PASS/FAIL line for an acceptance criterion."""
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
