"""
Backend router, schedule execution and backend comparison.
"""

import logging
from dataclasses import dataclass, replace

import numpy as np
import pandas as pd

from env.ancilla import OutcomeRecord, apply_frame_correction, run_single_qubit_circuit, run_two_qubit_circuit
from env.errors import CompileError, DomainError, GridMismatchError
from env.grid import CvState, check_same_grid, state_grids
from env.sensors import decode_logical, logical_fidelity

from .ancilla import compile_ancilla
from .exact import compile_exact

logger = logging.getLogger(__name__)

# branches lighter than this are kept in the log but not evolved further
PRUNE_PROBABILITY = 1e-28


def compile(ir, backend="exact", weight="constant", grids=None, normalization="unitary"):
    """Route an IR to the exact or ancilla backend."""
    if grids is None:
        raise CompileError("grids are required to compile")
    grids = tuple(grids)
    if backend == "exact":
        return compile_exact(ir, grids)
    if backend == "ancilla":
        return compile_ancilla(ir, grids, weight, normalization)
    raise CompileError(f"unknown backend {backend!r}")


@dataclass(frozen=True)
class ExecutionResult:
    backend: str
    records: tuple
    readouts: tuple

    def most_probable(self):
        best = max(range(len(self.records)), key=lambda i: self.records[i].probability)
        return self.records[best], self.readouts[best]

    @property
    def total_probability(self):
        return float(sum(r.probability for r in self.records))


def _check_input(schedule, state):
    grids = state_grids(state)
    if len(grids) != schedule.qubits:
        raise GridMismatchError(f"schedule has {schedule.qubits} mode(s), input has {len(grids)}")
    for expected, actual in zip(schedule.grids, grids):
        check_same_grid(expected, actual)
    if not state.is_finite():
        raise DomainError("input state has non-finite amplitudes")


def _run_exact(schedule, state):
    for step in schedule.steps:
        (op,) = step.ops
        if step.kind == "fiber":
            state = op.apply(state, mode=step.qubits[0])
        else:
            state = op.apply(state)
    return [OutcomeRecord((), state.norm ** 2, state)]


def _run_ancilla(schedule, state, workers):
    live = [OutcomeRecord((), state.norm ** 2, state)]
    done = []
    for step in schedule.steps:
        nxt = []
        for rec in live:
            if step.kind == "pair":
                u1, u2 = step.ops
                branches = run_single_qubit_circuit(rec.state, u1, u2, mode=step.qubits[0], workers=workers)
            else:
                branches = run_two_qubit_circuit(rec.state, *step.ops, workers=workers)
            for b in branches:
                fixed = apply_frame_correction(b, step.policy, mode=step.qubits[0])
                history = rec.history + ((step.gate, b.outcome, fixed.correction),)
                nxt.append(replace(fixed, outcome=rec.outcome + b.outcome, history=history))
        live = []
        for rec in nxt:
            (live if rec.probability > PRUNE_PROBABILITY else done).append(rec)
    return live + done


def execute(schedule, state, workers=1):
    """Replay a schedule; every outcome branch is kept and decoded after frame correction."""
    _check_input(schedule, state)
    if isinstance(state, CvState):
        state = state.position()
    if schedule.backend == "exact":
        records = _run_exact(schedule, state)
    else:
        records = _run_ancilla(schedule, state, workers)
    records = sorted(records, key=lambda r: r.outcome)
    readouts = tuple(decode_logical(r.state) if r.probability > PRUNE_PROBABILITY else None for r in records)
    for rec in records:
        logger.debug("%s outcome %s: p=%.12g", schedule.backend, rec.outcome, rec.probability)
    return ExecutionResult(schedule.backend, tuple(records), readouts)


def cv_fidelity(reference, candidate):
    """|<ref|cand>| / (||ref|| ||cand||); 0 for an empty branch."""
    denom = reference.norm * candidate.norm
    if denom == 0.0:
        return 0.0
    overlap = np.vdot(reference.amplitudes, candidate.amplitudes)
    return float(abs(overlap) / denom)


@dataclass(frozen=True)
class BackendReport:
    rows: tuple
    headline_outcome: tuple
    corrected_fidelity: float
    logical_fidelity: float
    success_probability: float

    def to_frame(self):
        frame = pd.DataFrame(list(self.rows), columns=["outcome", "probability", "cv_fidelity", "logical_fidelity", "correction"])
        frame["outcome"] = frame["outcome"].map(lambda o: "".join(str(b) for b in o) or "-")
        return frame

    def to_dict(self):
        return {
            "headline_outcome": "".join(str(b) for b in self.headline_outcome) or "-",
            "corrected_fidelity": self.corrected_fidelity,
            "logical_fidelity": self.logical_fidelity,
            "success_probability": self.success_probability,
            "outcomes": self.to_frame().to_dict(orient="records"),
        }


def compare_backends(ir, state, weight="cos_theta", reference="exact", candidate="ancilla",
                     normalization="unitary", workers=1):
    """Compare a candidate backend's corrected branches with the reference backend's single output."""
    grids = state_grids(state)
    ref = execute(compile(ir, reference, weight, grids, normalization), state, workers)
    if len(ref.records) != 1:
        raise CompileError("reference backend must produce a single outcome")
    ref_state, ref_readout = ref.records[0].state, ref.readouts[0]
    cand = execute(compile(ir, candidate, weight, grids, normalization), state, workers)

    rows = []
    for rec, readout in zip(cand.records, cand.readouts):
        lf = 0.0 if readout is None else logical_fidelity(readout.density, ref_readout.density)
        correction = "/".join(tag for _, _, tag in rec.history) or "none"
        rows.append((rec.outcome, rec.probability, cv_fidelity(ref_state, rec.state), lf, correction))
    best, best_readout = cand.most_probable()
    corrected = cv_fidelity(ref_state, best.state)
    lf = 0.0 if best_readout is None else logical_fidelity(best_readout.density, ref_readout.density)
    logger.info("compare %s vs %s: headline outcome %s fidelity %.12g", candidate, reference, best.outcome, corrected)
    return BackendReport(tuple(rows), best.outcome, corrected, lf, best.probability)
