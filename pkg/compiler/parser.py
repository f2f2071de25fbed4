"""
Circuit text format.

    # comment (anywhere on a line)
    qubits 2
    H 0
    RX 0 0.7853981633974483
    RN 1 0 0 1 0.5
    CNOT 0 1

The first non-comment line declares the qubit count (1 or 2); every other
line holds one gate with space-separated tokens and angles in radians.
"""

import math
import re
from dataclasses import dataclass

from env.errors import CircuitParseError

MAX_QUBITS = 2
PAULI_GATES = ("X", "Y", "Z", "H")
ROTATION_GATES = ("RX", "RY", "RZ", "RN")
TWO_QUBIT_GATES = ("CNOT", "CZ")
ROTATION_AXES = {"RX": (1.0, 0.0, 0.0), "RY": (0.0, 1.0, 0.0), "RZ": (0.0, 0.0, 1.0)}
# (qubit arguments, real arguments) after the gate name
ARITY = {
    **{g: (1, 0) for g in PAULI_GATES},
    **{g: (1, 1) for g in ("RX", "RY", "RZ")},
    "RN": (1, 4),
    **{g: (2, 0) for g in TWO_QUBIT_GATES},
}

_TOKEN = re.compile(r"\S+")


@dataclass(frozen=True)
class Gate:
    name: str
    qubits: tuple
    angle: float = None
    axis: tuple = None
    line: int = 0

    def to_dict(self):
        out = {"name": self.name, "qubits": list(self.qubits)}
        if self.angle is not None:
            out["angle"] = self.angle
        if self.axis is not None:
            out["axis"] = list(self.axis)
        return out


@dataclass(frozen=True)
class CircuitIR:
    qubits: int
    gates: tuple = ()

    def to_dict(self):
        return {"qubits": self.qubits, "gates": [g.to_dict() for g in self.gates]}


def _tokens(text):
    return [(m.group(0), m.start() + 1) for m in _TOKEN.finditer(text)]


def _int_token(token, col, lineno):
    if not re.fullmatch(r"\d+", token):
        raise CircuitParseError(f"expected a qubit index, got {token!r}", lineno, col)
    return int(token)


def _real_token(token, col, lineno):
    try:
        value = float(token)
    except ValueError:
        raise CircuitParseError(f"invalid number {token!r}", lineno, col) from None
    if not math.isfinite(value):
        raise CircuitParseError("angle must be finite", lineno, col)
    return value


def _parse_gate(tokens, lineno, qubits):
    (raw, col), args = tokens[0], tokens[1:]
    name = raw.upper()
    if name not in ARITY:
        raise CircuitParseError(f"unknown gate {raw!r}", lineno, col)
    n_qubits, n_reals = ARITY[name]
    if len(args) != n_qubits + n_reals:
        raise CircuitParseError(
            f"bad arity: {name} expects {n_qubits + n_reals} argument(s), got {len(args)}", lineno, col
        )
    targets = []
    for token, tcol in args[:n_qubits]:
        q = _int_token(token, tcol, lineno)
        if q >= qubits:
            raise CircuitParseError("qubit out of range", lineno, tcol)
        targets.append(q)
    if name in TWO_QUBIT_GATES and targets[0] == targets[1]:
        raise CircuitParseError("control and target must differ", lineno, args[1][1])
    reals = [_real_token(token, tcol, lineno) for token, tcol in args[n_qubits:]]

    if name in PAULI_GATES or name in TWO_QUBIT_GATES:
        return Gate(name, tuple(targets), line=lineno)
    if name == "RN":
        axis, angle = tuple(reals[:3]), reals[3]
        norm = math.sqrt(sum(c * c for c in axis))
        if norm == 0.0:
            raise CircuitParseError("axis must be nonzero", lineno, args[1][1])
        return Gate(name, tuple(targets), angle, tuple(c / norm for c in axis), lineno)
    return Gate(name, tuple(targets), reals[0], ROTATION_AXES[name], lineno)


def parse_circuit(text):
    """Parse circuit text into a validated CircuitIR; errors carry 1-based line and column."""
    qubits = None
    gates = []
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        tokens = _tokens(raw_line.split("#", 1)[0])
        if not tokens:
            continue
        if qubits is None:
            (head, col) = tokens[0]
            if head.lower() != "qubits" or len(tokens) != 2:
                raise CircuitParseError("expected 'qubits n' header", lineno, col)
            qubits = _int_token(tokens[1][0], tokens[1][1], lineno)
            if not 1 <= qubits <= MAX_QUBITS:
                raise CircuitParseError(f"unsupported qubit count {qubits}", lineno, tokens[1][1])
            continue
        gates.append(_parse_gate(tokens, lineno, qubits))
    if qubits is None:
        raise CircuitParseError("expected 'qubits n' header", max(1, len(text.splitlines())), 1)
    return CircuitIR(qubits, tuple(gates))


def load_circuit(path):
    with open(path, "rb") as f:
        raw = f.read()
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as e:
        head = raw[: e.start]
        line = head.count(b"\n") + 1
        column = e.start - (head.rfind(b"\n") + 1) + 1
        raise CircuitParseError("invalid UTF-8", line, column) from e
    return parse_circuit(text)
