"""
Ancilla-driven circuits on CV modes.

A CompositeState keeps one CV state per ancilla basis label. The one-ancilla
circuit is H, U1 on the ancilla-0 branch and U2 on the ancilla-1 branch,
then H again, so outcome i carries (U1 + (-1)**i U2) psi / 2. The two-ancilla
circuit entangles the ancillas into (|00> + |11>)/sqrt(2), applies U3 x U4
on |00> and U1 x U2 on |11>, then H x H; outcome (i, j) carries
(U3 x U4 + (-1)**(i^j) U1 x U2) psi / (2*sqrt(2)).
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from tools.gamma import (
    FiberOperator,
    GammaOperator,
    TwoModeGammaSum,
    complement_weight,
    modulated_identity,
    pauli_dot,
    rotation_operator,
)

from .dynamics import GaussianGate
from .errors import DomainError, GridMismatchError, InvariantViolation, PolicyError, WeightError
from .grid import CvState, TwoModeState, apply_on_mode, check_same_grid, state_grids
from .sensors import PAULI

logger = logging.getLogger(__name__)

UNITARITY_TOLERANCE = 1e-10
BRANCH_TOLERANCE = 1e-12
TWO_ANCILLA_CONSTANT = 1.0 / (2.0 * math.sqrt(2.0))
POLICIES = ("none", "swap", "phase", "axis", "parity")


class ProductOperator:
    """op_a on mode 0 and op_b on mode 1 of a TwoModeState; None is the identity."""

    def __init__(self, op_a=None, op_b=None, label=""):
        self.op_a = op_a
        self.op_b = op_b
        self.label = label or f"{_label(op_a)}(x){_label(op_b)}"

    def apply(self, state):
        if not isinstance(state, TwoModeState):
            raise DomainError("product operator needs a two-mode state")
        out = state
        if self.op_a is not None:
            out = apply_on_mode(self.op_a, out, 0)
        if self.op_b is not None:
            out = apply_on_mode(self.op_b, out, 1)
        return out

    def unitarity_defect(self, grids):
        return max(operator_defect(self.op_a, grids[0]), operator_defect(self.op_b, grids[1]))


def _label(op):
    if op is None:
        return "I"
    return getattr(op, "label", None) or str(op)


def apply_operator(op, state, mode=0):
    if op is None:
        return state
    if isinstance(op, (ProductOperator, TwoModeGammaSum)):
        return op.apply(state)
    return apply_on_mode(op, state, mode)


def operator_defect(op, grid):
    """Max-entry unitarity defect where it is cheap to compute; 0 for the identity."""
    if op is None:
        return 0.0
    if isinstance(op, ProductOperator):
        return op.unitarity_defect(grid)
    if isinstance(op, GaussianGate):
        return op.unitarity_defect(grid)
    if isinstance(op, FiberOperator):
        return op.unitarity_defect()
    if isinstance(op, GammaOperator):
        return op.fiber_operator().unitarity_defect()
    return 0.0


def _with_amplitudes(template, amplitudes):
    if isinstance(template, TwoModeState):
        return TwoModeState(template.grids, amplitudes)
    return CvState(template.grid, amplitudes)


def _check_finite(state):
    if not state.is_finite():
        raise DomainError("state has non-finite amplitudes")


@dataclass(frozen=True)
class CompositeState:
    """Ancilla register (qubits) times CV modes, as a map from ancilla label to CV state."""

    ancillas: int
    branches: dict

    @classmethod
    def prepare(cls, state, ancillas=1):
        _check_finite(state)
        if isinstance(state, CvState):
            state = state.position()
        return cls(ancillas, {(0,) * ancillas: state})

    @property
    def template(self):
        return next(iter(self.branches.values()))

    @property
    def total_probability(self):
        return float(sum(s.norm ** 2 for s in self.branches.values()))

    def hadamard(self, index):
        template = self.template
        acc = {}
        for label, state in self.branches.items():
            for bit in (0, 1):
                sign = -1.0 if (label[index] == 1 and bit == 1) else 1.0
                new = label[:index] + (bit,) + label[index + 1 :]
                term = (sign / math.sqrt(2.0)) * state.amplitudes
                acc[new] = acc[new] + term if new in acc else term
        return CompositeState(self.ancillas, {k: _with_amplitudes(template, acc[k]) for k in sorted(acc)})

    def cnot(self, control, target):
        moved = {}
        for label, state in self.branches.items():
            new = list(label)
            new[target] ^= label[control]
            moved[tuple(new)] = state
        return CompositeState(self.ancillas, dict(sorted(moved.items())))

    def entangle(self):
        """(|00> + |11>)/sqrt(2) on the two ancillas."""
        if self.ancillas != 2:
            raise DomainError("entangler needs two ancillas")
        return self.hadamard(0).cnot(0, 1)

    def controlled(self, ops, mode=0, workers=1):
        """Apply ops[label] to the branch with that ancilla label; unlisted labels are untouched."""
        labels = list(self.branches)

        def evolve(label):
            return apply_operator(ops.get(label), self.branches[label], mode)

        if workers > 1 and len(labels) > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                states = list(pool.map(evolve, labels))
        else:
            states = [evolve(label) for label in labels]
        return CompositeState(self.ancillas, dict(zip(labels, states)))


@dataclass(frozen=True)
class OutcomeRecord:
    outcome: tuple
    probability: float
    state: object
    correction: str = "none"
    history: tuple = field(default_factory=tuple)


def _records(composite):
    return [OutcomeRecord(label, s.norm ** 2, s) for label, s in sorted(composite.branches.items())]


def _warn_defects(ops, grid):
    unitary = True
    for name, op in ops:
        defect = operator_defect(op, grid)
        if defect > UNITARITY_TOLERANCE:
            unitary = False
            logger.warning("controlled operator %s is not unitary (defect %.3g)", name, defect)
    return unitary


def _max_error(a, b):
    return float(np.max(np.abs(a - b))) if a.size else 0.0


def run_single_qubit_circuit(psi, u1, u2, mode=0, workers=1, check=True):
    """Simulate the one-ancilla circuit; returns the two OutcomeRecords in outcome order."""
    _check_finite(psi)
    grid = state_grids(psi)[mode]
    unitary = _warn_defects((("U1", u1), ("U2", u2)), grid)
    comp = CompositeState.prepare(psi, 1).hadamard(0)
    comp = comp.controlled({(0,): u1, (1,): u2}, mode=mode, workers=workers).hadamard(0)
    records = _records(comp)
    if check:
        a = apply_operator(u1, psi, mode).amplitudes
        b = apply_operator(u2, psi, mode).amplitudes
        for rec in records:
            expected = (a + (-1) ** rec.outcome[0] * b) / 2
            err = _max_error(rec.state.amplitudes, expected)
            if err > BRANCH_TOLERANCE:
                raise InvariantViolation(f"branch {rec.outcome} differs from (U1 +- U2)psi/2 by {err:.3g}")
        _check_completeness(records, psi, unitary)
    for rec in records:
        logger.debug("outcome %s probability %.12g", rec.outcome, rec.probability)
    return records


def run_two_qubit_circuit(psi_ab, u1, u2, u3, u4, workers=1, check=True):
    """Simulate the two-ancilla circuit; returns four OutcomeRecords ordered (0,0), (0,1), (1,0), (1,1)."""
    if not isinstance(psi_ab, TwoModeState):
        raise DomainError("two-qubit circuit needs a TwoModeState")
    _check_finite(psi_ab)
    ga, gb = psi_ab.grids
    unitary = _warn_defects((("U1", u1), ("U3", u3)), ga) & _warn_defects((("U2", u2), ("U4", u4)), gb)
    odd = ProductOperator(u1, u2)
    even = ProductOperator(u3, u4)
    comp = CompositeState.prepare(psi_ab, 2).entangle()
    comp = comp.controlled({(1, 1): odd, (0, 0): even}, workers=workers).hadamard(0).hadamard(1)
    records = _records(comp)
    if check:
        a = even.apply(psi_ab).amplitudes
        b = odd.apply(psi_ab).amplitudes
        for rec in records:
            i, j = rec.outcome
            expected = TWO_ANCILLA_CONSTANT * (a + (-1) ** (i ^ j) * b)
            err = _max_error(rec.state.amplitudes, expected)
            if err > 1e-10:
                raise InvariantViolation(f"branch {rec.outcome} differs from the parity formula by {err:.3g}")
        _check_completeness(records, psi_ab, unitary)
    return records


def _check_completeness(records, psi, unitary):
    total = sum(r.probability for r in records)
    expected = psi.norm ** 2
    if unitary and abs(total - expected) > BRANCH_TOLERANCE:
        raise InvariantViolation(f"outcome probabilities sum to {total:.15g}, expected {expected:.15g}")
    if not unitary:
        logger.info("non-unitary pair: outcome probabilities sum to %.12g", total)


@dataclass(frozen=True)
class RotationPair:
    u1: FiberOperator
    u2: FiberOperator
    defect: float
    normalization: str = "printed"


def check_complementary(zeta, zeta_prime, tol=BRANCH_TOLERANCE):
    check_same_grid(zeta.grid, zeta_prime.grid)
    if np.max(np.abs(zeta.values ** 2 + zeta_prime.values ** 2 - 1.0)) > tol:
        raise WeightError("weights not complementary")


def make_rotation_pair(axis, alpha, zeta, zeta_prime, axis_prime=None, normalization="printed", twist=None):
    """
    U_k = c * [R(axis, alpha; zeta) + (-1)**(k+1) * R(axis', alpha - pi/2; zeta')] for k = 1, 2.

    c = 1/sqrt(2) reproduces the printed pair (U^dagger U = 1/2 fiberwise); c = 1
    gives an exactly unitary pair when axis' = axis. The branches are
    (U1 + U2)/2 = c * R(axis, alpha; zeta) and (U1 - U2)/2 = c * R(axis', alpha - pi/2; zeta').
    """
    check_complementary(zeta, zeta_prime)
    if normalization not in ("printed", "unitary"):
        raise DomainError(f"unknown normalization {normalization!r}")
    c = 1 / math.sqrt(2.0) if normalization == "printed" else 1.0
    r = rotation_operator(axis, alpha, zeta, twist)
    r_prime = rotation_operator(axis if axis_prime is None else axis_prime, alpha - math.pi / 2, zeta_prime, twist)
    u1 = c * (r + r_prime)
    u2 = c * (r - r_prime)
    u1.label, u2.label = f"U1[rot {alpha:g}]", f"U2[rot {alpha:g}]"
    defect = max(u1.unitarity_defect(), u2.unitarity_defect())
    logger.debug("rotation pair alpha=%g (%s): unitarity defect %.3g", alpha, normalization, defect)
    return RotationPair(u1, u2, defect, normalization)


def make_povm_unitaries(axis, weight, twist=None):
    """U1,2 = Gamma_axis(zeta) +- i*1_zeta'; outcome 0 carries Gamma psi and outcome 1 carries i*zeta' psi."""
    flip = GammaOperator(axis, weight, twist).fiber_operator()
    rest = modulated_identity(complement_weight(weight))
    u1 = flip + 1j * rest
    u2 = flip - 1j * rest
    u1.label, u2.label = f"U1[{flip.label}]", f"U2[{flip.label}]"
    return u1, u2


@dataclass(frozen=True)
class FramePolicy:
    """Outcome label -> (correction operator, tag); missing labels are left alone."""

    name: str
    corrections: dict = field(default_factory=dict)

    def lookup(self, outcome):
        return self.corrections.get(tuple(outcome), (None, "none"))


def _constant(grid, matrix, label):
    return FiberOperator.constant(grid, matrix, label)


def make_policy(name, grids=None, axis=None, twist=None, correction=None):
    """
    Frame-correction policies for the relabeling step after an ancilla readout.

    swap, phase and axis correct outcome (1,) with X, Z or n.sigma; parity
    corrects the odd-parity outcomes (0, 1) and (1, 0) with a ProductOperator.
    """
    if name == "none":
        return FramePolicy("none")
    if name == "parity":
        if not isinstance(correction, ProductOperator):
            raise PolicyError("parity policy needs a product correction")
        return FramePolicy("parity", {(0, 1): (correction, "parity"), (1, 0): (correction, "parity")})
    if name not in POLICIES:
        raise PolicyError(f"unknown policy {name!r}")
    if not grids:
        raise PolicyError(f"{name} policy needs a grid")
    grid = grids[0]
    if name == "swap":
        op = _constant(grid, PAULI["x"], "X")
    elif name == "phase":
        op = _constant(grid, PAULI["z"], "Z")
    else:
        if axis is None:
            raise PolicyError("axis policy needs an axis")
        op = FiberOperator(grid, pauli_dot(grid, axis, twist), "n.sigma")
    return FramePolicy(name, {(1,): (op, name)})


def apply_frame_correction(record, policy, mode=0):
    """Relabel an outcome branch according to policy; the branch probability is unchanged."""
    if isinstance(policy, str):
        policy = make_policy(policy, grids=state_grids(record.state))
    if not isinstance(policy, FramePolicy):
        raise PolicyError("unknown policy")
    op, tag = policy.lookup(record.outcome)
    if op is None:
        return replace(record, correction="none")
    if isinstance(op, FiberOperator):
        check_same_grid(op.grid, state_grids(record.state)[mode])
    elif isinstance(op, ProductOperator) and not isinstance(record.state, TwoModeState):
        raise GridMismatchError("product correction needs a two-mode branch")
    return replace(record, state=apply_operator(op, record.state, mode), correction=tag)
