"""
Gamma-operators acting fiberwise in the Zak domain.

Gamma_n = sum over fibers of zeta(s, m) * (n . sigma) on the pair
{|(theta_bar, k_bar)>, |(theta_bar + pi, k_bar)>}. The weight zeta is real,
so every Gamma is hermitian, but unitary only when |zeta| = 1 everywhere.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from env.errors import DomainError, GridMismatchError, WeightError
from env.grid import CvState, TwoModeState, apply_on_mode, check_same_grid
from env.sensors import PAULI
from env.zak import apply_fiber_matrices, to_sectors, zak_forward, zak_forward_two_mode, zak_inverse_two_mode

logger = logging.getLogger(__name__)

WEIGHT_FAMILIES = ("constant", "cos_theta", "sin_theta", "cos_pi_k", "sin_pi_k", "mixed_cos", "custom")
# Accepted spellings that resolve to a family above.
WEIGHT_ALIASES = {"paper_mixed": "mixed_cos"}
MAX_TWO_MODE_TERMS = 4


@dataclass(frozen=True)
class WeightSpec:
    """Real weight zeta(s, m) on the half-grid, shape (N_s/2, N_n)."""

    grid: object
    values: np.ndarray
    family: str = "custom"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        vals = np.asarray(self.values)
        if np.iscomplexobj(vals):
            if np.any(vals.imag != 0):
                raise WeightError("weight must be real")
            vals = vals.real
        vals = np.array(vals, dtype=float)
        if vals.shape != (self.grid.half, self.grid.nn):
            raise WeightError(f"weight shape {vals.shape} does not match the half-grid")
        if not np.all(np.isfinite(vals)):
            raise WeightError("weight must be finite")
        object.__setattr__(self, "values", vals)

    def __mul__(self, other):
        if isinstance(other, WeightSpec):
            check_same_grid(self.grid, other.grid)
            return WeightSpec(self.grid, self.values * other.values, "custom")
        return WeightSpec(self.grid, self.values * float(other), "custom")

    __rmul__ = __mul__

    @property
    def label(self):
        if self.family == "constant":
            return f"constant({self.params.get('value', 1.0):g})"
        return self.family


def make_weight(family, grid, value=1.0, values=None):
    """Tabulate a named weight family on the half-grid."""
    family = WEIGHT_ALIASES.get(family, family)
    th = grid.theta_bar[: grid.half][:, None]
    kb = grid.k_bar[None, :]
    shape = (grid.half, grid.nn)
    if family == "constant":
        return WeightSpec(grid, np.full(shape, float(value)), "constant", {"value": float(value)})
    if family == "cos_theta":
        vals = np.cos(th) + 0 * kb
    elif family == "sin_theta":
        vals = np.sin(th) + 0 * kb
    elif family == "cos_pi_k":
        vals = np.cos(np.pi * kb) + 0 * th
    elif family == "sin_pi_k":
        vals = np.sin(np.pi * kb) + 0 * th
    elif family == "mixed_cos":
        vals = np.cos(th - np.pi * kb)
    elif family == "custom":
        if values is None:
            raise WeightError("custom weight needs values")
        return WeightSpec(grid, values, "custom")
    else:
        raise WeightError(f"unknown weight family {family!r}")
    return WeightSpec(grid, vals, family)


def axis_vector(axis):
    """'x', 'y', 'z' or a real 3-vector, normalized."""
    if isinstance(axis, str):
        key = axis.lower()
        if key not in ("x", "y", "z"):
            raise DomainError(f"unknown axis {axis!r}")
        return tuple(float(key == c) for c in "xyz")
    n = np.asarray(axis, dtype=float)
    if n.shape != (3,) or not np.all(np.isfinite(n)) or np.linalg.norm(n) == 0:
        raise DomainError("axis must be a finite nonzero 3-vector")
    n = n / np.linalg.norm(n)
    return tuple(float(c) for c in n)


def pauli_dot(grid, axis, twist=None):
    """Per-fiber n.sigma with sigma_+ -> exp(i*tau)*sigma_+, shape (N_s/2, N_n, 2, 2)."""
    nx, ny, nz = axis_vector(axis)
    tau = np.zeros((grid.half, grid.nn)) if twist is None else np.broadcast_to(twist, (grid.half, grid.nn))
    m = np.zeros((grid.half, grid.nn, 2, 2), dtype=complex)
    m[..., 0, 0] = nz
    m[..., 1, 1] = -nz
    m[..., 0, 1] = (nx - 1j * ny) * np.exp(1j * tau)
    m[..., 1, 0] = (nx + 1j * ny) * np.exp(-1j * tau)
    return m


def shift_twist(grid):
    """Fiber twist tau = -pi*k_bar carried by flips generated from Shift(+-pi)."""
    return np.broadcast_to(-np.pi * grid.k_bar[None, :], (grid.half, grid.nn)).copy()


class FiberOperator:
    """Operator given by one 2x2 block per fiber."""

    def __init__(self, grid, matrices, label=""):
        mats = np.asarray(matrices, dtype=complex)
        if mats.shape != (grid.half, grid.nn, 2, 2):
            raise GridMismatchError(f"fiber blocks of shape {mats.shape} do not match grid")
        self.grid = grid
        self.matrices = mats
        self.label = label

    @classmethod
    def constant(cls, grid, matrix, label=""):
        block = np.asarray(matrix, dtype=complex)
        return cls(grid, np.broadcast_to(block, (grid.half, grid.nn, 2, 2)).copy(), label)

    def apply_array(self, amplitudes, grid):
        check_same_grid(self.grid, grid)
        return apply_fiber_matrices(self.matrices, amplitudes, grid)

    def apply(self, state, mode=0):
        return apply_on_mode(self, state, mode)

    def dagger(self):
        return FiberOperator(self.grid, np.conj(np.swapaxes(self.matrices, -1, -2)), self.label + "^dag")

    def __matmul__(self, other):
        check_same_grid(self.grid, other.grid)
        return FiberOperator(self.grid, self.matrices @ other.matrices, f"{self.label}*{other.label}")

    def __add__(self, other):
        check_same_grid(self.grid, other.grid)
        return FiberOperator(self.grid, self.matrices + other.matrices, f"{self.label}+{other.label}")

    def __sub__(self, other):
        return self + (-1.0) * other

    def __mul__(self, scalar):
        return FiberOperator(self.grid, complex(scalar) * self.matrices, self.label)

    __rmul__ = __mul__

    def __neg__(self):
        return (-1.0) * self

    def unitarity_defect(self, grid=None):
        eye = np.eye(2)
        gram = np.conj(np.swapaxes(self.matrices, -1, -2)) @ self.matrices
        return float(np.max(np.abs(gram - eye)))

    def hermiticity_defect(self):
        return float(np.max(np.abs(self.matrices - np.conj(np.swapaxes(self.matrices, -1, -2)))))


@dataclass(frozen=True)
class GammaOperator:
    axis: tuple
    weight: WeightSpec
    twist: np.ndarray = None

    def __post_init__(self):
        object.__setattr__(self, "axis", axis_vector(self.axis))

    @property
    def grid(self):
        return self.weight.grid

    def fiber_operator(self):
        mats = self.weight.values[..., None, None] * pauli_dot(self.grid, self.axis, self.twist)
        return FiberOperator(self.grid, mats, f"Gamma{self.axis}[{self.weight.label}]")

    def apply_array(self, amplitudes, grid):
        return self.fiber_operator().apply_array(amplitudes, grid)


def gamma(axis, weight, twist=None):
    return GammaOperator(axis, weight, twist)


def _apply_reporting(op, state):
    if not isinstance(state, (CvState, TwoModeState)):
        raise DomainError("expected a CvState")
    out = apply_on_mode(op, state)
    norm = out.norm
    logger.debug("%s -> output norm %.6g", getattr(op, "label", type(op).__name__), norm)
    return out, norm


def apply_gamma(state, op):
    """Apply a GammaOperator; the output is not renormalized. Returns (state, norm)."""
    check_same_grid(op.grid, state.grid)
    return _apply_reporting(op.fiber_operator(), state)


def modulated_identity(weight):
    mats = weight.values[..., None, None] * np.eye(2)
    return FiberOperator(weight.grid, mats, f"1[{weight.label}]")


def apply_modulated_identity(state, weight):
    check_same_grid(weight.grid, state.grid)
    return _apply_reporting(modulated_identity(weight), state)


def rotation_operator(axis, beta, weight, twist=None):
    """zeta * exp(i*beta*(n.sigma)) = cos(beta)*1_zeta + i*sin(beta)*Gamma_n, fiberwise."""
    if not math.isfinite(beta):
        raise DomainError("rotation angle must be finite")
    ns = pauli_dot(weight.grid, axis, twist)
    block = math.cos(beta) * np.eye(2) + 1j * math.sin(beta) * ns
    return FiberOperator(weight.grid, weight.values[..., None, None] * block, f"R({beta:g})[{weight.label}]")


def apply_rotation(state, axis, beta, weight, twist=None):
    check_same_grid(weight.grid, state.grid)
    return _apply_reporting(rotation_operator(axis, beta, weight, twist), state)


def complement_weight(weight, tol=1e-12):
    """zeta' = sqrt(1 - zeta**2), so that zeta**2 + zeta'**2 = 1 on every fiber."""
    if np.any(np.abs(weight.values) > 1.0 + tol):
        raise WeightError("not completable")
    vals = np.sqrt(np.clip(1.0 - weight.values ** 2, 0.0, None))
    family = {"cos_theta": "sin_theta", "cos_pi_k": "sin_pi_k"}.get(weight.family, "custom")
    if weight.family == "constant":
        c = weight.params["value"]
        return WeightSpec(weight.grid, vals, "constant", {"value": math.sqrt(max(0.0, 1 - c * c))})
    return WeightSpec(weight.grid, vals, family)


def povm_pair(op):
    """(Gamma, Gamma') with Gamma*Gamma + Gamma'*Gamma' = 1; same axis and twist."""
    return op, GammaOperator(op.axis, complement_weight(op.weight), op.twist)


def _term_block(axis, weight, twist=None):
    if isinstance(axis, str) and axis.lower() == "i":
        return weight.values[..., None, None] * PAULI["i"]
    return weight.values[..., None, None] * pauli_dot(weight.grid, axis, twist)


@dataclass(frozen=True)
class TwoModeTerm:
    """One tensor term Gamma_a (x) Gamma_b; axis 'i' stands for the modulated identity."""

    axis_a: object
    weight_a: WeightSpec
    axis_b: object
    weight_b: WeightSpec


class TwoModeGammaSum:
    """Sum of up to four tensor products of single-mode Gamma-type operators."""

    def __init__(self, terms, label=""):
        terms = tuple(TwoModeTerm(*t) if not isinstance(t, TwoModeTerm) else t for t in terms)
        if not terms:
            raise DomainError("two-mode operator needs at least one term")
        if len(terms) > MAX_TWO_MODE_TERMS:
            raise DomainError(f"at most {MAX_TWO_MODE_TERMS} tensor terms are supported")
        self.grids = (terms[0].weight_a.grid, terms[0].weight_b.grid)
        for t in terms:
            check_same_grid(self.grids[0], t.weight_a.grid)
            check_same_grid(self.grids[1], t.weight_b.grid)
        self.blocks = tuple(
            (_term_block(t.axis_a, t.weight_a), _term_block(t.axis_b, t.weight_b)) for t in terms
        )
        self.label = label

    def apply_field(self, values):
        ga, gb = self.grids
        g = values.reshape(values.shape[:-4] + (2, ga.half, ga.nn, 2, gb.half, gb.nn))
        out = sum(np.einsum("smij,tnkl,...jsmltn->...ismktn", a, b, g) for a, b in self.blocks)
        return out.reshape(values.shape)

    def apply(self, state):
        for expected, actual in zip(self.grids, state.grids):
            check_same_grid(expected, actual)
        values = zak_forward_two_mode(state)
        return zak_inverse_two_mode(self.apply_field(values), state.grids)

    def apply_array(self, amplitudes, grids=None):
        """Batched application on (..., D_a, D_b) arrays."""
        amps = np.asarray(amplitudes, dtype=complex)
        flat = amps.reshape((-1,) + amps.shape[-2:])
        out = np.stack([self.apply(TwoModeState(self.grids, a)).amplitudes for a in flat])
        return out.reshape(amps.shape)


def apply_two_mode_gamma(state, terms):
    """Apply sum_terms Gamma_a (x) Gamma_b via double-Zak fiber blocks. Returns (state, norm)."""
    if not isinstance(state, TwoModeState):
        raise DomainError("expected a TwoModeState")
    op = terms if isinstance(terms, TwoModeGammaSum) else TwoModeGammaSum(terms)
    out = op.apply(state)
    norm = out.norm
    logger.debug("two-mode gamma sum -> output norm %.6g", norm)
    return out, norm


def expectation(state, op):
    """<psi|A|psi> for a single-mode FiberOperator or GammaOperator (real part for hermitian A)."""
    fop = op.fiber_operator() if isinstance(op, GammaOperator) else op
    pos = state.position()
    out = fop.apply_array(pos.amplitudes, pos.grid)
    return complex(np.vdot(pos.amplitudes, out))


def fiber_blocks_of(state):
    """Sector view (2, N_s/2, N_n) of a single-mode state."""
    field = zak_forward(state)
    return to_sectors(field.values, field.grid)
