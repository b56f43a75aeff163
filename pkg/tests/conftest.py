import numpy as np
import pytest

from guesswork import _kernel
from guesswork.channels import FAMILY_NAMES, generate_hsic

_CRITERIA: list[str] = []


@pytest.fixture(scope="session", autouse=True)
def compiled_kernel():
    # keep JIT compilation out of timed sections
    _kernel.warmup()


@pytest.fixture(scope="session")
def hsic():
    return {name: generate_hsic(name) for name in FAMILY_NAMES}


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def criterion():
    """Record a one-line PASS/FAIL verdict shown in the terminal summary."""

    def report(name: str, ok: bool, detail: str = "") -> bool:
        line = f"{'PASS' if ok else 'FAIL'}  {name}" + (f"  ({detail})" if detail else "")
        _CRITERIA.append(line)
        print(line)
        return ok

    return report


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in _CRITERIA:
            terminalreporter.write_line(line)
