"""
Exact backend: every gate becomes a fiber-uniform operator with unit weight.

Single-qubit gates are Gamma-operators or rotations acting identically on
every fiber; CNOT and CZ are sums of two-mode tensor terms in which the
sector projectors of the control mode play the role of |0><0| and |1><1|.
"""

import hashlib
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from env.dynamics import GaussianGate
from env.errors import CompileError
from tools.gamma import FiberOperator, GammaOperator, TwoModeGammaSum, make_weight, rotation_operator

logger = logging.getLogger(__name__)

HADAMARD_AXIS = (1 / math.sqrt(2), 0.0, 1 / math.sqrt(2))
FLIP_AXES = {"X": (1.0, 0.0, 0.0), "Y": (0.0, 1.0, 0.0), "Z": (0.0, 0.0, 1.0), "H": HADAMARD_AXIS}

# (axis_a, weight_a, axis_b, weight_b) with mode a the control
CNOT_TERMS = (("i", 0.5, "i", 1.0), ("z", 0.5, "i", 1.0), ("i", 0.5, "x", 1.0), ("z", -0.5, "x", 1.0))
CZ_TERMS = (("i", 0.5, "i", 1.0), ("z", 0.5, "i", 1.0), ("i", 0.5, "z", 1.0), ("z", -0.5, "z", 1.0))


@dataclass(frozen=True)
class Step:
    """
    One schedule entry.

    kind is "fiber" (ops = (op,) on qubits[0]), "two_mode" (ops = (sum,)),
    "pair" (ops = (U1, U2) on qubits[0]) or "pair2" (ops = (U1, U2, U3, U4)).
    """

    gate: str
    qubits: tuple
    kind: str
    ops: tuple
    weight: str = "constant"
    policy: object = None


@dataclass(frozen=True)
class CompiledSchedule:
    backend: str
    qubits: int
    grids: tuple
    steps: tuple = ()
    weight: str = "constant"
    options: dict = field(default_factory=dict)

    def fingerprint(self):
        """sha256 over the full numeric content of the schedule."""
        h = hashlib.sha256()
        h.update(f"{self.backend}|{self.qubits}|{self.weight}|{sorted(self.options.items())}".encode())
        for g in self.grids:
            h.update(repr(g).encode())
        for step in self.steps:
            h.update(f"{step.gate}|{step.qubits}|{step.kind}|{step.weight}".encode())
            for op in step.ops:
                _hash_operator(h, op)
            if step.policy is not None:
                h.update(step.policy.name.encode())
                for outcome, (op, tag) in sorted(step.policy.corrections.items()):
                    h.update(f"{outcome}|{tag}".encode())
                    _hash_operator(h, op)
        return h.hexdigest()

    def describe(self):
        return [
            {"gate": s.gate, "qubits": list(s.qubits), "kind": s.kind, "weight": s.weight,
             "policy": None if s.policy is None else s.policy.name}
            for s in self.steps
        ]


def _hash_operator(h, op):
    if op is None:
        h.update(b"I")
    elif isinstance(op, FiberOperator):
        h.update(np.ascontiguousarray(op.matrices).tobytes())
    elif isinstance(op, TwoModeGammaSum):
        for a, b in op.blocks:
            h.update(np.ascontiguousarray(a).tobytes())
            h.update(np.ascontiguousarray(b).tobytes())
    elif isinstance(op, GaussianGate):
        h.update(repr((op.factors, op.phase)).encode())
    elif hasattr(op, "op_a"):
        _hash_operator(h, op.op_a)
        _hash_operator(h, op.op_b)
    else:
        h.update(repr(op).encode())


def rotation_angle(gate):
    """exp(-i*beta*(n.sigma)/2) is the fiberwise rotation with angle -beta/2."""
    return -gate.angle / 2


def unit_weight(grid, value=1.0):
    return make_weight("constant", grid, value=value)


def single_qubit_operator(gate, grid):
    if gate.name in FLIP_AXES:
        return GammaOperator(FLIP_AXES[gate.name], unit_weight(grid)).fiber_operator()
    return rotation_operator(gate.axis, rotation_angle(gate), unit_weight(grid))


def two_qubit_operator(gate, grids):
    """Tensor-term sum for CNOT/CZ with the control on gate.qubits[0]."""
    terms = CNOT_TERMS if gate.name == "CNOT" else CZ_TERMS
    control, _ = gate.qubits
    built = []
    for ax_c, w_c, ax_t, w_t in terms:
        if control == 0:
            built.append((ax_c, unit_weight(grids[0], w_c), ax_t, unit_weight(grids[1], w_t)))
        else:
            built.append((ax_t, unit_weight(grids[0], w_t), ax_c, unit_weight(grids[1], w_c)))
    return TwoModeGammaSum(built, label=f"{gate.name}{gate.qubits}")


def compile_exact(ir, grids):
    if len(grids) != ir.qubits:
        raise CompileError(f"circuit has {ir.qubits} qubit(s) but {len(grids)} grid(s) were given")
    steps = []
    for gate in ir.gates:
        if len(gate.qubits) == 1:
            q = gate.qubits[0]
            steps.append(Step(gate.name, gate.qubits, "fiber", (single_qubit_operator(gate, grids[q]),)))
        elif gate.name in ("CNOT", "CZ"):
            steps.append(Step(gate.name, gate.qubits, "two_mode", (two_qubit_operator(gate, grids),)))
        else:
            raise CompileError(f"gate {gate.name} is not supported by the exact backend")
    logger.debug("compiled %d gate(s) to %d exact step(s)", len(ir.gates), len(steps))
    return CompiledSchedule("exact", ir.qubits, tuple(grids), tuple(steps))
