import numpy as np
import pytest

from gartfima import ModelSpec


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def table2_spec():
    return ModelSpec(d=0.4, lam=0.2, u=0.1, ar=(0.5,), sigma2=2.0)


_CRITERIA_KEY = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_CRITERIA_KEY] = []


@pytest.fixture
def criterion(request):
    """Record and assert an acceptance line; lines are echoed in the terminal summary."""
    lines = request.config.stash[_CRITERIA_KEY]

    def report(label, ok, detail):
        line = f"[{'PASS' if ok else 'FAIL'}] {label}: {detail}"
        lines.append(line)
        print("\n" + line)
        assert ok, detail

    return report


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_CRITERIA_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
