import math

import numpy as np
import pytest

from gecmv.models import from_arrays

GOLDEN = (math.sqrt(5) - 1) / 2


def random_sequence(rng, size=400, coupling=0.7, start=None, rho="random", convention="standard"):
    """Random alpha in the disk of radius ``coupling``; rho with random phases unless rho='convention'."""
    start = -size // 2 if start is None else start
    alpha = coupling * np.sqrt(rng.random(size)) * np.exp(2j * np.pi * rng.random(size))
    rho_vals = None
    if rho == "random":
        rho_vals = np.sqrt(1 - np.abs(alpha) ** 2) * np.exp(2j * np.pi * rng.random(size))
    return from_arrays(alpha, start, rho=rho_vals, rho_convention=convention)


def random_z(rng):
    return complex(np.exp(2j * np.pi * rng.random()))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE: dict[int, str] = {}


def record(number, passed, detail):
    """Register one acceptance line; printed in the terminal summary."""
    ACCEPTANCE[number] = f"criterion {number}: {'PASS' if passed else 'FAIL'} | {detail}"


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[k])
