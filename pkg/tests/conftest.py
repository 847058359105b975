import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from panelroot.limitlaw import default_moments  # noqa: E402


@pytest.fixture(scope="session")
def moments():
    return default_moments()


@pytest.fixture
def np_rng():
    return np.random.default_rng(12345)


def random_walk_panel(rng, n, T):
    return np.cumsum(rng.standard_normal((n, T)), axis=1)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(module.RESULTS):
        terminalreporter.write_line(module.RESULTS[number])
