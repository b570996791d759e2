import numpy as np
import pytest

OSC3 = np.array([[0.2, 0.1, 0.0], [9.0, 11.0, 1.0], [0.0, 1.0, 3.0]])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def osc3():
    return OSC3.copy()


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
