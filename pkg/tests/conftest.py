import sys

import numpy as np
import pytest

from basesc import _kernels
from basesc.core import Dataset


@pytest.fixture(params=_kernels.BACKENDS)
def backend(request):
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def make_dataset(X, normalized=False):
    return Dataset.from_array(np.asarray(X, dtype=float), normalized=normalized)



def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
