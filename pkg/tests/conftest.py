"""Shared fixtures and the acceptance summary hook."""

import numpy as np
import pytest

from domsplit import JacobiOperator, cocycle_map, periodic_operator

ACCEPTANCE_LINES = []


def record_acceptance(label, ok, detail):
    ACCEPTANCE_LINES.append((label, bool(ok), detail))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for label, ok, detail in ACCEPTANCE_LINES:
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"[{status}] {label}: {detail}")


@pytest.fixture
def free_op():
    "a = 1, b = 0 on a 200-site window"
    return JacobiOperator(
        j_lo=-100, a=np.ones(200, dtype=complex), b=np.zeros(200)
    )


@pytest.fixture
def free_seq(free_op):
    return cocycle_map(free_op, 3.0)


@pytest.fixture
def period2_op():
    return periodic_operator([1.0, 1.0], [0.0, 1.5], (-150, 149))


@pytest.fixture
def mod5_op():
    "couplings die at j = 0 mod 5, so the operator is a direct sum of 5-site blocks"
    return periodic_operator(
        [0.0, 1.0, 1.0, 1.0, 1.0], [0.3, -0.2, 0.5, 0.0, 0.1], (-200, 199)
    )


def random_operator(rng, n=120, complex_a=True, j_lo=None):
    "bounded random Jacobi window with couplings kept away from zero"
    if j_lo is None:
        j_lo = -(n // 2)
    mag = 0.5 + rng.random(n)
    if complex_a:
        phase = np.exp(2j * np.pi * rng.random(n))
        a = mag * phase
    else:
        a = mag.astype(complex)
    b = rng.uniform(-1.0, 1.0, n)
    return JacobiOperator(j_lo=j_lo, a=a, b=b)


def random_matseq(rng, n=40, j_lo=0, scale=1.0):
    from domsplit import MatSequence

    vals = scale * (
        rng.standard_normal((n, 2, 2)) + 1j * rng.standard_normal((n, 2, 2))
    )
    return MatSequence(j_lo, vals)
