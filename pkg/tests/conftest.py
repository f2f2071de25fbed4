import math

import numpy as np
import pytest
from scipy.linalg import expm

from env.grid import CvState, make_grid
from tools.codec import make_envelope

X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
I2 = np.eye(2, dtype=complex)
H = (X + Z) / math.sqrt(2)
P0, P1 = np.diag([1, 0]).astype(complex), np.diag([0, 1]).astype(complex)


def _single(gate):
    fixed = {"X": X, "Y": Y, "Z": Z, "H": H}
    if gate.name in fixed:
        return fixed[gate.name]
    nx, ny, nz = gate.axis
    return expm(-0.5j * gate.angle * (nx * X + ny * Y + nz * Z))


def textbook_output(ir, vector):
    """Reference state-vector simulator on 2**n amplitudes, qubit 0 most significant."""
    psi = np.asarray(vector, dtype=complex)
    for gate in ir.gates:
        if gate.name in ("CNOT", "CZ"):
            c, t = gate.qubits
            target = X if gate.name == "CNOT" else Z
            ops = [None, None]
            ops[c], ops[t] = P0, I2
            a = np.kron(*ops)
            ops[c], ops[t] = P1, target
            b = np.kron(*ops)
            psi = (a + b) @ psi
        else:
            u = _single(gate)
            if ir.qubits == 2:
                u = np.kron(u, I2) if gate.qubits[0] == 0 else np.kron(I2, u)
            psi = u @ psi
    return psi


def logical_vector(chi, phi):
    return np.array([math.cos(chi / 2), np.exp(1j * phi) * math.sin(chi / 2)])


@pytest.fixture
def grid():
    return make_grid(8, 4)


@pytest.fixture
def medium_grid():
    return make_grid(16, 8)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def gaussian_env(grid):
    return make_envelope("gaussian", grid)


@pytest.fixture
def uniform_env(grid):
    return make_envelope("uniform", grid)


@pytest.fixture
def random_cv_state(rng):
    def build(g):
        v = rng.normal(size=g.dimension) + 1j * rng.normal(size=g.dimension)
        return CvState(g, v / np.linalg.norm(v))

    return build


@pytest.fixture
def textbook():
    return textbook_output
