import numpy as np
import pytest

from rimspinor.clifford import CONVENTIONS, build_gamma_basis

ACCEPTANCE_LINES = []


@pytest.fixture(params=CONVENTIONS)
def basis(request):
    return build_gamma_basis(request.param)


@pytest.fixture
def dirac():
    return build_gamma_basis("standard-Dirac")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def record_acceptance():
    def add(number, name, passed, detail):
        ACCEPTANCE_LINES.append((number, name, passed, detail))
    return add


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number, name, passed, detail in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {number}. {name}: {detail}")
