"""
Discrete Zak transform to and from the modular basis.

Position index j = s + N_s*n splits into theta_bar_s = s*dtheta and period n.
The modular basis vector |(theta_bar_s, k_bar_m)> carries phase
exp(+i*2*pi*n*k_bar_m) on period n, so

    g(s, m) = N_n**-0.5 * sum_n psi(s, n) * exp(-i*2*pi*n*m/N_n)

is a unitary FFT over the period axis. A fiber is the pair of coefficients
(s, m) and (s + N_s/2, m); the first entry is the base sector [0, pi).
"""

import logging
from dataclasses import dataclass

import numpy as np

from .errors import FiberIndexError, GridMismatchError
from .grid import CvState, TwoModeState

logger = logging.getLogger(__name__)


def zak_array(amplitudes, grid):
    """Zak transform along the last axis: (..., D) -> (..., N_s, N_n)."""
    a = np.asarray(amplitudes, dtype=complex)
    periods = a.reshape(a.shape[:-1] + (grid.nn, grid.ns))
    g = np.fft.fft(periods, axis=-2, norm="ortho")
    return np.swapaxes(g, -1, -2)


def izak_array(values, grid):
    """Inverse of zak_array: (..., N_s, N_n) -> (..., D)."""
    g = np.swapaxes(np.asarray(values, dtype=complex), -1, -2)
    periods = np.fft.ifft(g, axis=-2, norm="ortho")
    return periods.reshape(periods.shape[:-2] + (grid.dimension,))


def to_sectors(values, grid):
    """(..., N_s, N_n) -> (..., 2, N_s/2, N_n) with the sector axis first."""
    return values.reshape(values.shape[:-2] + (2, grid.half, grid.nn))


def from_sectors(sectors, grid):
    return sectors.reshape(sectors.shape[:-3] + (grid.ns, grid.nn))


def apply_fiber_matrices(matrices, amplitudes, grid):
    """Multiply every fiber of position amplitudes (..., D) by its 2x2 block (N_s/2, N_n, 2, 2)."""
    sectors = to_sectors(zak_array(amplitudes, grid), grid)
    out = np.einsum("hmij,...jhm->...ihm", matrices, sectors)
    return izak_array(from_sectors(out, grid), grid)


@dataclass(frozen=True)
class ModularField:
    """Zak-domain coefficients g(theta_bar_s, k_bar_m), shape (N_s, N_n)."""

    grid: object
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        if vals.shape != (self.grid.ns, self.grid.nn):
            raise GridMismatchError(f"field shape {vals.shape} does not match grid")
        object.__setattr__(self, "values", vals)

    @property
    def norm(self):
        return float(np.linalg.norm(self.values))

    def sectors(self):
        return to_sectors(self.values, self.grid)

    def multiply_theta_bar(self):
        return ModularField(self.grid, self.values * self.grid.theta_bar[:, None])

    def multiply_k_bar(self):
        return ModularField(self.grid, self.values * self.grid.k_bar[None, :])


@dataclass(frozen=True)
class FiberQubit:
    s: int
    m: int
    amplitudes: np.ndarray


@dataclass(frozen=True)
class QubitParams:
    """Per-fiber amplitude f, polar angle alpha, relative phase phi and global phase."""

    grid: object
    f: np.ndarray
    alpha: np.ndarray
    phi: np.ndarray
    phase: np.ndarray
    empty: np.ndarray

    def to_field(self):
        base = self.f * np.cos(self.alpha / 2) * np.exp(1j * self.phase)
        shifted = self.f * np.sin(self.alpha / 2) * np.exp(1j * (self.phase + self.phi))
        return ModularField(self.grid, np.concatenate([base, shifted], axis=0))


def zak_forward(state):
    pos = state.position()
    return ModularField(pos.grid, zak_array(pos.amplitudes, pos.grid))


def zak_inverse(field):
    return CvState(field.grid, izak_array(field.values, field.grid))


def zak_forward_two_mode(state):
    """Double Zak transform of a TwoModeState -> array (N_s_a, N_n_a, N_s_b, N_n_b)."""
    ga, gb = state.grids
    along_b = zak_array(state.amplitudes, gb)
    moved = np.moveaxis(along_b, 0, -1)
    along_a = zak_array(moved, ga)
    return np.moveaxis(along_a, (-2, -1), (0, 1))


def zak_inverse_two_mode(values, grids):
    ga, gb = grids
    moved = np.moveaxis(values, (0, 1), (-2, -1))
    along_a = izak_array(moved, ga)
    amps = izak_array(np.moveaxis(along_a, -1, 0), gb)
    return TwoModeState(grids, amps)


def fiber_view(field, s, m):
    grid = field.grid
    if not 0 <= s < grid.half:
        raise FiberIndexError("not a base-sector index")
    if not 0 <= m < grid.nn:
        raise FiberIndexError("k_bar index out of range")
    v = np.array([field.values[s, m], field.values[s + grid.half, m]])
    return FiberQubit(s, m, v)


def extract_qubit_params(field, atol=0.0):
    """Per-fiber qubit angles; fibers with norm <= atol get alpha = phi = 0 and are flagged."""
    v0, v1 = field.sectors()
    a0, a1 = np.abs(v0), np.abs(v1)
    f = np.hypot(a0, a1)
    empty = f <= atol
    alpha = np.where(empty, 0.0, 2 * np.arctan2(a1, a0))
    arg0 = np.where(a0 > 0, np.angle(v0), 0.0)
    arg1 = np.where(a1 > 0, np.angle(v1), 0.0)
    phi = np.where(empty, 0.0, np.mod(arg1 - arg0, 2 * np.pi))
    if empty.any():
        logger.debug("%d of %d fibers are empty", int(empty.sum()), empty.size)
    return QubitParams(field.grid, f, alpha, phi, arg0, empty)
