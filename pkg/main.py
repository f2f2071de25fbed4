import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np
import pandas as pd

from compiler.parser import CircuitIR, load_circuit
from compiler.planner import compare_backends, compile, execute
from env.errors import ConfigError, GridMismatchError, InvariantViolation, ModularError
from env.grid import CvState, TwoModeState, make_grid, state_grids
from env.sensors import logical_fidelity
from eval.harness import SUITE_ALIASES, SUITES, run_verify, sigma_sweep
from tools.codec import encode_product, make_envelope
from tools.config import load_config

logger = logging.getLogger("modular")

EXIT_OK, EXIT_INPUT, EXIT_INVARIANT, EXIT_IO = 0, 2, 3, 4
STATE_FORMAT = "modular-cv-state/1"


def _numbers(values):
    return "[" + ", ".join(format(float(v), ".17g") for v in values) + "]"


def dump_state(state, path):
    """JSON dump with separate real/imaginary arrays at 17 significant digits."""
    amps = np.asarray(state.amplitudes)
    flat = amps.reshape(-1)
    fields = {
        "format": json.dumps(STATE_FORMAT),
        "grids": json.dumps([[g.ns, g.nn] for g in state_grids(state)]),
        "shape": json.dumps(list(amps.shape)),
        "real": _numbers(flat.real),
        "imag": _numbers(flat.imag),
    }
    body = ",\n".join(f'  "{k}": {fields[k]}' for k in sorted(fields))
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("{\n" + body + "\n}\n", encoding="utf-8")
    return path


def load_state(path, expected_grids=None):
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except ValueError as e:
        raise ConfigError(f"{path}: not a state dump: {e}") from e
    if not isinstance(raw, dict) or raw.get("format") != STATE_FORMAT:
        found = raw.get("format") if isinstance(raw, dict) else None
        raise ConfigError(f"{path}: unknown state format {found!r}")
    missing = [k for k in ("grids", "shape", "real", "imag") if k not in raw]
    if missing:
        raise ConfigError(f"{path}: state dump is missing {', '.join(missing)}")
    try:
        grids = tuple(make_grid(ns, nn) for ns, nn in raw["grids"])
        shape = tuple(int(n) for n in raw["shape"])
        real = np.asarray(raw["real"], dtype=float)
        imag = np.asarray(raw["imag"], dtype=float)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"{path}: malformed state dump: {e}") from e
    if len(grids) not in (1, 2) or shape != tuple(g.dimension for g in grids):
        raise ConfigError(f"{path}: shape {list(shape)} does not match grids {raw['grids']}")
    if real.ndim != 1 or real.shape != imag.shape or real.size != int(np.prod(shape)):
        raise ConfigError(f"{path}: expected {int(np.prod(shape))} real and imaginary values")
    if expected_grids is not None and tuple(expected_grids) != grids:
        raise GridMismatchError(f"state dump grid {raw['grids']} does not match the configured grid")
    amps = (real + 1j * imag).reshape(shape)
    if len(grids) == 2:
        return TwoModeState(grids, amps)
    return CvState(grids[0], amps)


def prepare_run(cfg):
    grid = cfg.make_grid()
    n = len(cfg.inputs)
    grids = (grid,) * n
    ir = load_circuit(cfg.circuit) if cfg.circuit is not None else CircuitIR(n, ())
    if ir.qubits != n:
        raise ConfigError(f"circuit declares {ir.qubits} qubit(s) but {n} input(s) are configured")
    if cfg.initial_state is not None:
        state = load_state(cfg.initial_state, grids)
    else:
        env = make_envelope(cfg.envelope["family"], grid, **cfg.envelope["params"])
        state = encode_product(list(cfg.inputs), [env] * n)
    return ir, grids, state


def _outcome_key(outcome):
    return "".join(str(b) for b in outcome) or "-"


def run_metrics(cfg):
    ir, grids, state = prepare_run(cfg)
    schedule = compile(ir, cfg.backend, cfg.weight, grids, cfg.pair_normalization)
    result = execute(schedule, state, workers=cfg.workers)
    reference = result if cfg.backend == "exact" else execute(compile(ir, "exact", grids=grids), state)
    ref_readout = reference.readouts[0]

    outcomes = []
    for rec, readout in zip(result.records, result.readouts):
        entry = {"outcome": _outcome_key(rec.outcome), "probability": rec.probability,
                 "correction": "/".join(t for _, _, t in rec.history) or "none"}
        if readout is not None:
            entry.update({
                "density_real": readout.density.real.tolist(),
                "density_imag": readout.density.imag.tolist(),
                "purity": readout.purity,
                "fidelity": logical_fidelity(readout.density, ref_readout.density),
            })
            if readout.mode_count == 1:
                entry["bloch"] = list(readout.bloch)
            else:
                entry["entropy_a"] = readout.entropy(keep=0)
        outcomes.append(entry)

    total = result.total_probability
    unitary = cfg.backend == "exact" or cfg.pair_normalization == "unitary"
    if unitary and abs(total - 1.0) > cfg.invariant_tolerance:
        raise InvariantViolation(f"outcome probabilities sum to {total:.15g}")

    metrics = {
        "backend": cfg.backend,
        "weight": cfg.weight,
        "grid": list(cfg.grid),
        "seed": cfg.seed,
        "circuit": ir.to_dict(),
        "fingerprint": schedule.fingerprint(),
        "total_probability": total,
        "outcomes": outcomes,
    }
    if cfg.backend == "ancilla":
        metrics["comparison"] = compare_backends(ir, state, cfg.weight, normalization=cfg.pair_normalization,
                                                 workers=cfg.workers).to_dict()
    return metrics, result, state


def cmd_run(args):
    cfg = load_config(args.config).with_overrides(args.seed, args.workers, args.out)
    metrics, result, state = run_metrics(cfg)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "metrics.json").write_text(json.dumps(metrics, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    _outcome_frame(metrics).to_csv(out / "outcomes.csv", index=False, float_format="%.17g")
    if cfg.dump_states:
        _dump_all(out, state, result)
    if cfg.sweep.get("sigma_theta"):
        if len(cfg.inputs) != 1:
            raise ConfigError("the sigma sweep needs a one-qubit circuit")
        ir, _, _ = prepare_run(cfg)
        frame = sigma_sweep(cfg.sweep["sigma_theta"], cfg.grid, cfg.weight, ir, workers=cfg.workers,
                            max_dimension=cfg.max_dimension)
        frame.to_csv(out / "sigma_sweep.csv", index=False, float_format="%.17g")
    print(json.dumps({k: metrics[k] for k in ("backend", "total_probability", "fingerprint")}, indent=2, sort_keys=True))
    return EXIT_OK


def _outcome_frame(metrics):
    cols = ["outcome", "probability", "fidelity", "purity", "correction"]
    return pd.DataFrame([{c: o.get(c) for c in cols} for o in metrics["outcomes"]], columns=cols)


def _dump_all(out, state, result):
    states = out / "states"
    dump_state(state, states / "input.json")
    for rec in result.records:
        dump_state(rec.state, states / f"outcome_{_outcome_key(rec.outcome)}.json")


def cmd_dump_state(args):
    cfg = load_config(args.config).with_overrides(args.seed, args.workers, args.out)
    out = Path(cfg.out)
    if args.input_only:
        _, _, state = prepare_run(cfg)
        path = dump_state(state, out / "states" / "input.json")
        print(path)
        return EXIT_OK
    _, result, state = run_metrics(cfg)
    _dump_all(out, state, result)
    print(out / "states")
    return EXIT_OK


def cmd_verify(args):
    if args.suite not in SUITES + tuple(SUITE_ALIASES) + ("all",):
        logger.error("unknown suite %r (choose from %s, all)", args.suite, ", ".join(SUITES))
        return EXIT_INPUT
    seed = 42 if args.seed is None else args.seed
    table = run_verify(args.suite, seed=seed, workers=args.workers or 1, progress=args.progress)
    print(table.to_string(index=False))
    if args.out:
        Path(args.out).mkdir(parents=True, exist_ok=True)
        table.to_csv(Path(args.out) / f"verify_{args.suite}.csv", index=False, float_format="%.17g")
    return EXIT_OK if bool(table["passed"].all()) else EXIT_INVARIANT


def cmd_grid_info(args):
    if args.config:
        grid = load_config(args.config).make_grid()
    else:
        grid = make_grid(*args.grid)
    print(json.dumps(grid.describe(), indent=2, sort_keys=True))
    return EXIT_OK


def build_parser():
    ap = argparse.ArgumentParser(description="Modular-variable CV qubit simulator")
    ap.add_argument("--log-level", type=str, default="WARNING")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, config_required=True):
        p.add_argument("--config", type=str, required=config_required)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--workers", type=int, default=None)
        p.add_argument("--out", type=str, default=None)

    p = sub.add_parser("run")
    common(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("verify")
    p.add_argument("suite", type=str)
    p.add_argument("--progress", action="store_true")
    common(p, config_required=False)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("dump-state")
    common(p)
    p.add_argument("--input-only", action="store_true")
    p.set_defaults(func=cmd_dump_state)

    p = sub.add_parser("grid-info")
    common(p, config_required=False)
    p.add_argument("--grid", type=int, nargs=2, default=[8, 4])
    p.set_defaults(func=cmd_grid_info)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level.upper(), logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except InvariantViolation as e:
        logger.error("invariant violation: %s", e)
        return EXIT_INVARIANT
    except ModularError as e:
        logger.error("%s", e)
        return EXIT_INPUT
    except OSError as e:
        logger.error("I/O error: %s", e)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
