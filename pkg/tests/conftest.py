import numpy as np
import pytest

from volterra_nlms.kernel import VolterraKernel, coeff_count

# filled by tests/test_acceptance.py, printed at the end of the run
ACCEPTANCE_RESULTS = {}


def random_kernel(rng, memory, order=3, scale=(1.0, 0.3, 0.1)):
    parts = {
        f"h{p}": rng.normal(0.0, scale[p - 1], coeff_count(p, memory))
        for p in range(1, order + 1)
    }
    return VolterraKernel(memory=memory, order=order, **parts)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS):
        status, text = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"[{status}] C{key:<2d} {text}")
