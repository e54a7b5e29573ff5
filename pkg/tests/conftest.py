import sys

import numpy as np
import pytest
from hypothesis import settings

from decaytimes.model import EntangledStateSpec, KaonParams

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")


@pytest.fixture(scope="session")
def params():
    return KaonParams()


@pytest.fixture(scope="session")
def singlet():
    return EntangledStateSpec.singlet()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
