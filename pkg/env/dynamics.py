"""
Gaussian gates on the cyclic phase grid.

Each primitive is diagonal in one representation, so a gate is applied as a
sequence of diagonal phase multiplications separated by unitary FFTs.
Shift(a) acts as psi(theta) -> psi(theta + a) through the momentum phase
exp(i*a*k), which is exact for every real a on the cyclic grid.
"""

import cmath
import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .grid import MOMENTUM, POSITION, apply_on_mode

logger = logging.getLogger(__name__)


def _finite(value, name):
    if not math.isfinite(value):
        raise DomainError(f"{name} parameter must be finite")
    return float(value)


@dataclass(frozen=True)
class Shift:
    """exp(i*a*k): translation theta -> theta + a."""

    a: float

    def __post_init__(self):
        object.__setattr__(self, "a", _finite(self.a, "Shift"))

    domain = MOMENTUM

    def diagonal(self, grid):
        return np.exp(1j * self.a * grid.k)

    def inverse(self):
        return Shift(-self.a)


@dataclass(frozen=True)
class Boost:
    """exp(i*b*theta): position-diagonal phase ramp."""

    b: float

    def __post_init__(self):
        object.__setattr__(self, "b", _finite(self.b, "Boost"))

    domain = POSITION

    def diagonal(self, grid):
        return np.exp(1j * self.b * grid.theta)

    def inverse(self):
        return Boost(-self.b)


@dataclass(frozen=True)
class PosShear:
    """exp(i*c*theta**2)."""

    c: float

    def __post_init__(self):
        object.__setattr__(self, "c", _finite(self.c, "PosShear"))

    domain = POSITION

    def diagonal(self, grid):
        return np.exp(1j * self.c * grid.theta ** 2)

    def inverse(self):
        return PosShear(-self.c)


@dataclass(frozen=True)
class MomShear:
    """exp(i*d*k**2)."""

    d: float

    def __post_init__(self):
        object.__setattr__(self, "d", _finite(self.d, "MomShear"))

    domain = MOMENTUM

    def diagonal(self, grid):
        return np.exp(1j * self.d * grid.k ** 2)

    def inverse(self):
        return MomShear(-self.d)


@dataclass(frozen=True)
class GaussianGate:
    """Product of primitive factors, written left to right and applied right to left."""

    factors: tuple = ()
    phase: complex = 1.0 + 0j

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        phase = complex(self.phase)
        if not cmath.isfinite(phase) or abs(abs(phase) - 1.0) > 1e-12:
            raise DomainError("global phase must have unit magnitude")
        object.__setattr__(self, "phase", phase)

    def __matmul__(self, other):
        return GaussianGate(self.factors + other.factors, self.phase * other.phase)

    def dagger(self):
        return GaussianGate(tuple(f.inverse() for f in reversed(self.factors)), self.phase.conjugate())

    def _stages(self, grid):
        """Merge consecutive factors that are diagonal in the same representation."""
        stages = []
        for factor in reversed(self.factors):
            diag = factor.diagonal(grid)
            if stages and stages[-1][0] == factor.domain:
                stages[-1] = (factor.domain, stages[-1][1] * diag)
            else:
                stages.append((factor.domain, diag))
        return stages

    def apply_array(self, amplitudes, grid):
        out = np.asarray(amplitudes, dtype=complex)
        for domain, diag in self._stages(grid):
            if domain == MOMENTUM:
                out = np.fft.ifft(np.fft.fft(out, axis=-1, norm="ortho") * diag, axis=-1, norm="ortho")
            else:
                out = out * diag
        return out * self.phase

    def unitarity_defect(self, grid):
        if not self.factors:
            return abs(abs(self.phase) - 1.0)
        return max(float(np.max(np.abs(np.abs(f.diagonal(grid)) - 1.0))) for f in self.factors)

    def __str__(self):
        parts = [f"{type(f).__name__}({next(iter(vars(f).values())):g})" for f in self.factors]
        return "*".join(parts) or "I"


IDENTITY = GaussianGate()


def gate(*factors, phase=1.0):
    return GaussianGate(tuple(factors), phase)


def apply_gaussian_gate(state, g):
    """Apply a GaussianGate, returning the result in the input's representation."""
    out = apply_on_mode(g, state.position())
    return out.momentum() if state.representation == MOMENTUM else out


def literal_u1():
    """exp(i*pi*k^2/2) exp(i*k) exp(-i*pi*k^2/2); the shears cancel, leaving Shift(1)."""
    return gate(MomShear(math.pi / 2), Shift(1.0), MomShear(-math.pi / 2))


def sheared_shift(a, c):
    """Shift(a) conjugated by the position shear exp(i*c*theta^2)."""
    return gate(PosShear(c), Shift(a), PosShear(-c))


def shift_pair(a=math.pi):
    """(Shift(a), Shift(-a)): the U2 = U1^dagger pair whose branches are cos(a*k) and i*sin(a*k)."""
    u1 = gate(Shift(a))
    return u1, u1.dagger()


def random_gate(rng, n_factors=4):
    """Random Gaussian gate with O(1) parameters, for property checks."""
    kinds = (Shift, Boost, PosShear, MomShear)
    scales = {Shift: 2 * math.pi, Boost: 3.0, PosShear: 0.05, MomShear: 0.5}
    factors = []
    for _ in range(n_factors):
        kind = kinds[int(rng.integers(len(kinds)))]
        factors.append(kind(float(rng.uniform(-1, 1) * scales[kind])))
    return GaussianGate(tuple(factors), cmath.exp(1j * float(rng.uniform(0, 2 * math.pi))))
