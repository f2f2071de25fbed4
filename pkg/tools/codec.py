"""
Logical encoding of CV qubits on the modular grid.

A logical state cos(chi/2)|0> + exp(i*phi) sin(chi/2)|1> puts cos(chi/2)*f in
the base sector and exp(i*phi) sin(chi/2)*f in the shifted sector of the
Zak domain, for one shared envelope f over the fibers.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from env.errors import DomainError, EnvelopeError, GridMismatchError
from env.grid import TwoModeState, check_same_grid
from env.zak import ModularField, zak_inverse, zak_inverse_two_mode
from tools.gamma import GammaOperator, expectation, modulated_identity

logger = logging.getLogger(__name__)

ENVELOPE_FAMILIES = ("uniform", "gaussian", "single_fiber")
DEFAULT_GAUSSIAN = {
    "theta0": math.pi / 2,
    "sigma_theta": math.pi / 8,
    "k0": 0.5,
    "sigma_k": 0.125,
}


@dataclass(frozen=True)
class Envelope:
    """Normalized fiber envelope f(s, m) on the half-grid."""

    grid: object
    values: np.ndarray
    family: str = "uniform"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        if vals.shape != (self.grid.half, self.grid.nn):
            raise GridMismatchError(f"envelope shape {vals.shape} does not match the half-grid")
        object.__setattr__(self, "values", vals)

    @property
    def weights(self):
        """|f|**2 per fiber; sums to 1."""
        return np.abs(self.values) ** 2


def _wrap(delta, period):
    return (delta + period / 2) % period - period / 2


def _normalized(grid, values, family, params):
    values = np.asarray(values, dtype=complex)
    total = float(np.sum(np.abs(values) ** 2))
    if not math.isfinite(total) or total <= 0.0:
        raise EnvelopeError("degenerate envelope")
    return Envelope(grid, values / math.sqrt(total), family, dict(params))


def make_envelope(family, grid, **params):
    """Build a normalized envelope; gaussian widths are per-axis and the gaussian wraps periodically."""
    if family == "uniform":
        return _normalized(grid, np.ones((grid.half, grid.nn)), family, {})
    if family == "single_fiber":
        s0, m0 = int(params.get("s0", 0)), int(params.get("m0", 0))
        if not (0 <= s0 < grid.half and 0 <= m0 < grid.nn):
            raise EnvelopeError("single_fiber index outside the half-grid")
        values = np.zeros((grid.half, grid.nn))
        values[s0, m0] = 1.0
        return _normalized(grid, values, family, {"s0": s0, "m0": m0})
    if family == "gaussian":
        p = {**DEFAULT_GAUSSIAN, **params}
        for key in ("sigma_theta", "sigma_k"):
            if not (math.isfinite(p[key]) and p[key] > 0):
                raise EnvelopeError(f"{key} must be positive")
        d_theta = _wrap(grid.theta_bar[: grid.half] - p["theta0"], math.pi)
        d_k = _wrap(grid.k_bar - p["k0"], 1.0)
        values = np.outer(
            np.exp(-(d_theta ** 2) / (4 * p["sigma_theta"] ** 2)),
            np.exp(-(d_k ** 2) / (4 * p["sigma_k"] ** 2)),
        )
        return _normalized(grid, values, family, p)
    raise EnvelopeError(f"unknown envelope family {family!r}")


def logical_amplitudes(chi, phi):
    if not (math.isfinite(chi) and math.isfinite(phi)):
        raise DomainError("logical angles must be finite")
    return np.array([math.cos(chi / 2), complex(math.cos(phi), math.sin(phi)) * math.sin(chi / 2)])


def encode_logical(chi, phi, env):
    """CvState for cos(chi/2)|0> + exp(i*phi) sin(chi/2)|1> on envelope env."""
    c0, c1 = logical_amplitudes(chi, phi)
    values = np.concatenate([c0 * env.values, c1 * env.values], axis=0)
    return zak_inverse(ModularField(env.grid, values))


def encode_basis(bit, env):
    return encode_logical(math.pi * int(bit), 0.0, env)


def encode_two_mode(coefficients, env_a, env_b):
    """Two-mode state sum c_ab |a>|b> with per-mode envelopes; c in order 00, 01, 10, 11."""
    c = np.asarray(coefficients, dtype=complex).reshape(-1)
    if c.shape != (4,):
        raise DomainError("two-qubit coefficients must have 4 entries")
    norm = np.linalg.norm(c)
    if norm == 0 or not np.isfinite(norm):
        raise DomainError("two-qubit coefficients must be finite and nonzero")
    ga, gb = env_a.grid, env_b.grid
    blocks = np.einsum("ij,am,bn->iamjbn", (c / norm).reshape(2, 2), env_a.values, env_b.values)
    return zak_inverse_two_mode(blocks.reshape(ga.ns, ga.nn, gb.ns, gb.nn), (ga, gb))


def encode_product(inputs, envelopes):
    """Product state of per-qubit (chi, phi) inputs; one or two modes."""
    if len(inputs) != len(envelopes) or len(inputs) not in (1, 2):
        raise DomainError("need one envelope per qubit, for one or two qubits")
    if len(inputs) == 1:
        return encode_logical(*inputs[0], envelopes[0])
    a = logical_amplitudes(*inputs[0])
    b = logical_amplitudes(*inputs[1])
    return encode_two_mode(np.kron(a, b), envelopes[0], envelopes[1])


def bloch_readout(state, weight):
    """(<Gamma_x>, <Gamma_y>, <Gamma_z>, <1_zeta>) for a single-mode state."""
    if isinstance(state, TwoModeState):
        raise DomainError("bloch readout is single-mode")
    check_same_grid(weight.grid, state.grid)
    values = [expectation(state, GammaOperator(axis, weight)).real for axis in "xyz"]
    values.append(expectation(state, modulated_identity(weight)).real)
    return tuple(float(v) for v in values)


def primed_fidelity(env, weight):
    """Overlap of the normalized primed state (envelope f*zeta) with the unprimed one."""
    check_same_grid(env.grid, weight.grid)
    w = env.weights
    num = float(np.sum(w * weight.values))
    den = math.sqrt(float(np.sum(w)) * float(np.sum(w * weight.values ** 2)))
    if den == 0.0:
        return 0.0
    return abs(num) / den
