from functools import reduce

import numpy as np
import pytest

from shardsim.circuit import Circuit, Permute, RandomCircuitSpec, generate_random_circuit


def full_unitary(instructions, n):
    """Brute-force 2^n x 2^n unitary of a gate list (qubit q is bit q of the index)."""
    eye, p0, p1 = np.eye(2), np.diag([1.0, 0.0]), np.diag([0.0, 1.0])

    def embed(ops):
        # ops: qubit -> 2x2; kron runs from qubit n-1 down to qubit 0
        return reduce(np.kron, [ops.get(q, eye) for q in reversed(range(n))])

    u = np.eye(1 << n, dtype=complex)
    for g in instructions:
        if isinstance(g, Permute):
            continue
        if g.control is None:
            step = embed({g.target: g.matrix})
        else:
            step = embed({g.control: p0}) + embed({g.control: p1, g.target: g.matrix})
        u = step @ u
    return u


def random_circuit(n, gates, p, seed):
    return generate_random_circuit(RandomCircuitSpec(n, gates, p, seed))


def random_unitary_entries(rng):
    z = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    q, r = np.linalg.qr(z)
    q = q * (np.diag(r) / np.abs(np.diag(r)))
    return q


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def bell():
    from shardsim.circuit import CNOT, H

    return Circuit(2, [H(0), CNOT(0, 1)])


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
