"""
Ancilla backend: every gate becomes a controlled pair (one ancilla) or a
controlled quadruple (two ancillas) plus a frame-correction policy.

  X, Y, Z, H   flip pair Gamma(zeta) +- i*1_zeta'; outcome 1 is corrected by
               the gate's own Pauli axis.
  X, cos_pi_k  Gaussian shift pair (Shift(pi), Shift(-pi)); both outcomes
               flip, so no correction.
  Z, cos_theta Gaussian boost pair (Boost(1), Boost(-1)); both outcomes apply
               Z, so no correction.
  R*(beta)     rotation pair around the gate axis with angle -beta/2;
               outcome 1 is corrected by n.sigma.
  CZ, CNOT     fiber-uniform products with unit weight; the odd-parity
               outcomes are corrected by Z x Z (CZ) or Z x X (CNOT).
"""

import logging
import math

import numpy as np
from scipy import linalg

from env.ancilla import ProductOperator, make_policy, make_povm_unitaries, make_rotation_pair
from env.dynamics import Boost, gate, shift_pair
from env.errors import CompileError
from env.sensors import PAULI
from tools.gamma import WEIGHT_ALIASES, FiberOperator, complement_weight, make_weight

from .exact import FLIP_AXES, CompiledSchedule, Step, rotation_angle

logger = logging.getLogger(__name__)

ANCILLA_WEIGHTS = ("constant", "cos_theta", "sin_theta", "cos_pi_k", "sin_pi_k", "mixed_cos")
GAUSSIAN_PAIRS = {("X", "cos_pi_k"), ("Z", "cos_theta")}
FLIP_POLICIES = {"X": "swap", "Z": "phase", "Y": "axis", "H": "axis"}

# CZ = exp(i*pi/4) * (R x R) * (1 + i Z x Z)/sqrt(2) with R = exp(-i*pi*Z/4)
_R = linalg.expm(-1j * math.pi / 4 * PAULI["z"])
_H = (PAULI["x"] + PAULI["z"]) / math.sqrt(2)


def _entangler_blocks(name):
    """(U1, U2, U3, U4) logical blocks and the odd-parity correction (c_control, c_target)."""
    a_c, a_t = _R, _R
    b_c, b_t = 1j * _R @ PAULI["z"], _R @ PAULI["z"]
    if name == "CZ":
        return (b_c, b_t, a_c, a_t), (PAULI["z"], PAULI["z"])
    # CNOT: conjugate the target by H
    a_t, b_t = _H @ a_t @ _H, _H @ b_t @ _H
    return (b_c, b_t, a_c, a_t), (PAULI["z"], PAULI["x"])


def _by_mode(control, values):
    """Reorder a (control, target) pair into mode order (0, 1)."""
    return values if control == 0 else (values[1], values[0])


def _flip_step(g, grid, weight_name):
    q = g.qubits[0]
    if (g.name, weight_name) in GAUSSIAN_PAIRS:
        if g.name == "X":
            u1, u2 = shift_pair(math.pi)
        else:
            u1, u2 = gate(Boost(1.0)), gate(Boost(-1.0))
        return Step(g.name, g.qubits, "pair", (u1, u2), weight_name, make_policy("none"))
    zeta = make_weight(weight_name, grid)
    axis = FLIP_AXES[g.name]
    u1, u2 = make_povm_unitaries(axis, zeta)
    policy = make_policy(FLIP_POLICIES[g.name], grids=(grid,), axis=axis)
    logger.debug("qubit %d: %s as flip pair with weight %s", q, g.name, weight_name)
    return Step(g.name, g.qubits, "pair", (u1, u2), weight_name, policy)


def _rotation_step(g, grid, weight_name, normalization):
    zeta = make_weight(weight_name, grid)
    pair = make_rotation_pair(g.axis, rotation_angle(g), zeta, complement_weight(zeta),
                              normalization=normalization)
    policy = make_policy("axis", grids=(grid,), axis=g.axis)
    return Step(g.name, g.qubits, "pair", (pair.u1, pair.u2), weight_name, policy)


def _entangler_step(g, grids):
    control, _ = g.qubits
    (b_c, b_t, a_c, a_t), (c_c, c_t) = _entangler_blocks(g.name)
    g0, g1 = grids

    def ops(block_c, block_t, tag):
        first, second = _by_mode(control, (block_c, block_t))
        return FiberOperator.constant(g0, first, f"{tag}0"), FiberOperator.constant(g1, second, f"{tag}1")

    u1, u2 = ops(b_c, b_t, "B")
    u3, u4 = ops(a_c, a_t, "A")
    corr = ProductOperator(*ops(c_c, c_t, "C"))
    return Step(g.name, g.qubits, "pair2", (u1, u2, u3, u4), "constant", make_policy("parity", correction=corr))


def compile_ancilla(ir, grids, weight="cos_theta", normalization="unitary"):
    weight = WEIGHT_ALIASES.get(weight, weight)
    if weight not in ANCILLA_WEIGHTS:
        raise CompileError(f"weight family {weight!r} is not supported by the ancilla backend")
    if len(grids) != ir.qubits:
        raise CompileError(f"circuit has {ir.qubits} qubit(s) but {len(grids)} grid(s) were given")
    steps = []
    for g in ir.gates:
        if g.name in FLIP_AXES:
            steps.append(_flip_step(g, grids[g.qubits[0]], weight))
        elif g.axis is not None:
            steps.append(_rotation_step(g, grids[g.qubits[0]], weight, normalization))
        elif g.name in ("CNOT", "CZ"):
            steps.append(_entangler_step(g, grids))
        else:
            raise CompileError(f"gate {g.name} is not supported by the ancilla backend")
    logger.debug("compiled %d gate(s) to %d ancilla step(s)", len(ir.gates), len(steps))
    return CompiledSchedule("ancilla", ir.qubits, tuple(grids), tuple(steps), weight,
                            {"normalization": normalization})


def entangler_matrix(name, outcome):
    """Logical 4x4 map carried by one outcome of the two-ancilla entangler, before correction."""
    (b_c, b_t, a_c, a_t), _ = _entangler_blocks(name)
    i, j = outcome
    return (np.kron(a_c, a_t) + (-1) ** (i ^ j) * np.kron(b_c, b_t)) / (2 * math.sqrt(2))
