"""
Discretized phase space for one continuous-variable mode.

Positions are the dimensionless theta of the modular decomposition
theta = 2*pi*N + theta_bar, sampled on [0, 2*pi*N_n) with N_s points per
period; momenta are the conjugate k with [theta, k] = i, so plane waves are
exp(i*k*theta) and k = M + k_bar with k_bar in [0, 1).
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, GridError, GridMismatchError, RepresentationError

logger = logging.getLogger(__name__)

MAX_DIMENSION = 4096
POSITION = "position"
MOMENTUM = "momentum"


@dataclass(frozen=True)
class GridSpec:
    """Cyclic lattice of N_s samples per 2*pi period over N_n periods."""

    samples_per_period: int
    period_count: int

    @property
    def ns(self):
        return self.samples_per_period

    @property
    def nn(self):
        return self.period_count

    @property
    def half(self):
        # number of theta_bar values in one sector
        return self.samples_per_period // 2

    @property
    def dimension(self):
        return self.samples_per_period * self.period_count

    @property
    def dtheta(self):
        return 2 * np.pi / self.samples_per_period

    @property
    def dk(self):
        return 1.0 / self.period_count

    @property
    def theta(self):
        return np.arange(self.dimension) * self.dtheta

    @property
    def k(self):
        D = self.dimension
        u = np.arange(D)
        return ((u + D // 2) % D - D // 2) * self.dk

    @property
    def theta_bar(self):
        return np.arange(self.samples_per_period) * self.dtheta

    @property
    def k_bar(self):
        return np.arange(self.period_count) * self.dk

    def describe(self):
        return {
            "samples_per_period": self.samples_per_period,
            "period_count": self.period_count,
            "dimension": self.dimension,
            "dtheta": self.dtheta,
            "dk": self.dk,
            "theta_range": [0.0, 2 * np.pi * self.period_count],
            "k_range": [-self.samples_per_period / 2, self.samples_per_period / 2],
        }


def make_grid(samples_per_period, period_count, max_dimension=None):
    """Build a GridSpec, rejecting odd N_s and oversize grids."""
    limit = MAX_DIMENSION if max_dimension is None else max_dimension
    try:
        ns, nn = int(samples_per_period), int(period_count)
    except (TypeError, ValueError) as e:
        raise GridError("grid sizes must be integers") from e
    if ns != samples_per_period or nn != period_count:
        raise GridError("grid sizes must be integers")
    if ns < 2 or nn < 1:
        raise GridError("grid sizes must be positive (N_s >= 2, N_n >= 1)")
    if ns % 2:
        raise GridError("sector pairing impossible")
    if ns * nn > limit:
        raise GridError("grid too large")
    return GridSpec(ns, nn)


def modular_decompose_theta(theta):
    """Split theta into (N, theta_bar) with theta = 2*pi*N + theta_bar."""
    if not math.isfinite(theta):
        raise DomainError("theta must be finite")
    period = 2 * math.pi
    n = math.floor(theta / period)
    rest = theta - n * period
    if rest >= period:
        n, rest = n + 1, rest - period
    elif rest < 0:
        n, rest = n - 1, rest + period
    return int(n), float(rest)


def modular_decompose_k(k):
    """Split k into (M, k_bar) with k = M + k_bar, k_bar in [0, 1)."""
    if not math.isfinite(k):
        raise DomainError("k must be finite")
    m = math.floor(k)
    rest = k - m
    if rest >= 1.0:
        m, rest = m + 1, rest - 1.0
    return int(m), float(rest)


@dataclass(frozen=True)
class CvState:
    """Amplitudes of one mode; position amplitude j is psi(theta_j)*sqrt(dtheta)."""

    grid: GridSpec
    amplitudes: np.ndarray
    representation: str = POSITION

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (self.grid.dimension,):
            raise GridMismatchError(
                f"expected {self.grid.dimension} amplitudes, got shape {amps.shape}"
            )
        if self.representation not in (POSITION, MOMENTUM):
            raise RepresentationError(f"unknown representation {self.representation!r}")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def norm(self):
        return float(np.linalg.norm(self.amplitudes))

    def position(self):
        return self if self.representation == POSITION else to_position(self)

    def momentum(self):
        return self if self.representation == MOMENTUM else to_momentum(self)

    def normalized(self):
        n = self.norm
        if n == 0:
            raise DomainError("cannot normalize a zero state")
        return CvState(self.grid, self.amplitudes / n, self.representation)

    def is_finite(self):
        return bool(np.all(np.isfinite(self.amplitudes)))


@dataclass(frozen=True)
class TwoModeState:
    """Joint position amplitudes of modes a and b, shape (D_a, D_b)."""

    grids: tuple
    amplitudes: np.ndarray

    def __post_init__(self):
        grids = tuple(self.grids)
        if len(grids) != 2:
            raise GridMismatchError("a two-mode state needs exactly two grids")
        amps = np.asarray(self.amplitudes, dtype=complex)
        shape = (grids[0].dimension, grids[1].dimension)
        if amps.shape != shape:
            raise GridMismatchError(f"expected amplitude shape {shape}, got {amps.shape}")
        object.__setattr__(self, "grids", grids)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def norm(self):
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self):
        n = self.norm
        if n == 0:
            raise DomainError("cannot normalize a zero state")
        return TwoModeState(self.grids, self.amplitudes / n)

    def is_finite(self):
        return bool(np.all(np.isfinite(self.amplitudes)))

    @classmethod
    def product(cls, state_a, state_b):
        a, b = state_a.position(), state_b.position()
        return cls((a.grid, b.grid), np.outer(a.amplitudes, b.amplitudes))


def to_momentum(state):
    if state.representation != POSITION:
        raise RepresentationError("state is not in position representation")
    return CvState(state.grid, np.fft.fft(state.amplitudes, norm="ortho"), MOMENTUM)


def to_position(state):
    if state.representation != MOMENTUM:
        raise RepresentationError("state is not in momentum representation")
    return CvState(state.grid, np.fft.ifft(state.amplitudes, norm="ortho"), POSITION)


def check_same_grid(expected, actual):
    if expected != actual:
        raise GridMismatchError(f"grid mismatch: {expected} vs {actual}")


def state_grids(state):
    return state.grids if isinstance(state, TwoModeState) else (state.grid,)


def apply_on_axis(op, amplitudes, grid, axis):
    """Apply a single-mode operator along one axis of a multi-mode amplitude array."""
    moved = np.moveaxis(amplitudes, axis, -1)
    out = op.apply_array(moved, grid)
    return np.moveaxis(out, -1, axis)


def apply_on_mode(op, state, mode=0):
    """Apply a single-mode operator to a CvState (mode 0) or one mode of a TwoModeState."""
    if isinstance(state, TwoModeState):
        grid = state.grids[mode]
        return TwoModeState(state.grids, apply_on_axis(op, state.amplitudes, grid, mode))
    if mode != 0:
        raise GridMismatchError("single-mode state has only mode 0")
    pos = state.position()
    return CvState(pos.grid, op.apply_array(pos.amplitudes, pos.grid))
