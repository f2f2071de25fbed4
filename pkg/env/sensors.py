"""
Logical readout of CV states.

Decoding traces out the fiber index: every fiber contributes its 2**n
component amplitude vector v and rho_L = sum v v^dagger / sum v^dagger v.
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .errors import DomainError
from .grid import TwoModeState
from .zak import to_sectors, zak_forward, zak_forward_two_mode

logger = logging.getLogger(__name__)

PAULI = {
    "i": np.eye(2, dtype=complex),
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass(frozen=True)
class LogicalReadout:
    density: np.ndarray
    norm: float
    mode_count: int

    @property
    def trace(self):
        return float(np.real(np.trace(self.density)))

    @property
    def purity(self):
        return float(np.real(np.trace(self.density @ self.density)))

    @property
    def bloch(self):
        if self.mode_count != 1:
            return None
        return tuple(float(np.real(np.trace(self.density @ PAULI[a]))) for a in "xyz")

    def reduced(self, keep):
        """Reduced single-qubit density matrix of a two-qubit readout."""
        if self.mode_count != 2:
            raise DomainError("reduced density needs a two-qubit readout")
        rho = self.density.reshape(2, 2, 2, 2)
        if keep == 0:
            return np.einsum("ikjk->ij", rho)
        return np.einsum("kikj->ij", rho)

    def entropy(self, keep=None):
        rho = self.density if keep is None else self.reduced(keep)
        return von_neumann_entropy(rho)


def fiber_vectors(state):
    """(2**n, fibers) matrix of fiber amplitude vectors, mode a most significant."""
    if isinstance(state, TwoModeState):
        ga, gb = state.grids
        field = zak_forward_two_mode(state)
        blocks = field.reshape(2, ga.half, ga.nn, 2, gb.half, gb.nn)
        return np.transpose(blocks, (0, 3, 1, 2, 4, 5)).reshape(4, -1)
    field = zak_forward(state)
    return to_sectors(field.values, field.grid).reshape(2, -1)


def decode_logical(state):
    """Fiber-index partial trace, renormalized; the pre-normalization norm is reported."""
    v = fiber_vectors(state)
    rho = v @ v.conj().T
    weight = float(np.real(np.trace(rho)))
    if weight <= 0.0:
        raise DomainError("cannot decode a zero-norm state")
    if abs(weight - 1.0) > 1e-12:
        logger.debug("decode renormalized state with norm^2 %.6g", weight)
    modes = 2 if isinstance(state, TwoModeState) else 1
    return LogicalReadout(rho / weight, float(np.sqrt(weight)), modes)


def _check_density(rho, tol):
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise DomainError("density matrix must be square")
    if np.max(np.abs(rho - rho.conj().T)) > tol:
        raise DomainError("density matrix is not hermitian")
    herm = (rho + rho.conj().T) / 2
    if linalg.eigh(herm, eigvals_only=True).min() < -tol:
        raise DomainError("density matrix is not positive semidefinite")
    if np.real(np.trace(herm)) <= tol:
        raise DomainError("density matrix has zero trace")
    return herm


def _psd_sqrt(rho):
    w, v = linalg.eigh(rho)
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T


def logical_fidelity(rho, sigma, tol=1e-10):
    """Uhlmann fidelity (tr sqrt(sqrt(rho) sigma sqrt(rho)))**2 of trace-normalized inputs."""
    rho, sigma = _check_density(rho, tol), _check_density(sigma, tol)
    if rho.shape != sigma.shape:
        raise DomainError("density matrices have different dimensions")
    rho = rho / np.real(np.trace(rho))
    sigma = sigma / np.real(np.trace(sigma))
    root = _psd_sqrt(rho)
    inner = linalg.eigh(root @ sigma @ root, eigvals_only=True)
    f = float(np.sum(np.sqrt(np.clip(inner, 0.0, None))) ** 2)
    return min(max(f, 0.0), 1.0)


def von_neumann_entropy(rho):
    """Entropy in bits."""
    w = linalg.eigh(np.asarray(rho, dtype=complex), eigvals_only=True)
    w = w[w > 1e-15]
    return float(-np.sum(w * np.log2(w)))


def pure_density(vector):
    v = np.asarray(vector, dtype=complex)
    v = v / np.linalg.norm(v)
    return np.outer(v, v.conj())
