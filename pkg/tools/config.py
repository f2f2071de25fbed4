"""Run configuration: YAML (or JSON) files loaded into a validated RunConfig."""

import logging
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import yaml

from env.errors import ConfigError, ModularError
from env.grid import MAX_DIMENSION, make_grid
from tools.codec import ENVELOPE_FAMILIES
from tools.gamma import WEIGHT_ALIASES, WEIGHT_FAMILIES

logger = logging.getLogger(__name__)

BACKENDS = ("exact", "ancilla")
NORMALIZATIONS = ("unitary", "printed")


@dataclass(frozen=True)
class RunConfig:
    grid: tuple = (8, 4)
    max_dimension: int = MAX_DIMENSION
    envelope: dict = field(default_factory=lambda: {"family": "gaussian", "params": {}})
    inputs: tuple = ((0.0, 0.0),)
    weight: str = "constant"
    backend: str = "exact"
    circuit: Path = None
    pair_normalization: str = "unitary"
    initial_state: Path = None
    sweep: dict = field(default_factory=dict)
    seed: int = 42
    workers: int = 1
    out: Path = Path("runs")
    dump_states: bool = False
    invariant_tolerance: float = 1e-10

    def make_grid(self):
        return make_grid(*self.grid, max_dimension=self.max_dimension)

    def with_overrides(self, seed=None, workers=None, out=None):
        changes = {}
        if seed is not None:
            changes["seed"] = int(seed)
        if workers is not None:
            changes["workers"] = int(workers)
        if out is not None:
            changes["out"] = Path(out)
        return replace(self, **changes) if changes else self


def load_config(path):
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            raw = yaml.safe_load(f) or {}
    except FileNotFoundError as e:
        raise ConfigError(f"configuration file not found: {path}") from e
    except yaml.YAMLError as e:
        raise ConfigError(f"{path}: not valid YAML/JSON: {e}") from e
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    return config_from_dict(raw, base_dir=path.parent)


def _resolve(value, base_dir):
    if value is None:
        return None
    p = Path(value)
    return p if p.is_absolute() else Path(base_dir) / p


def _scalar(cfg, key, default, kind):
    value = cfg.get(key, default)
    try:
        return kind(value)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"{key} must be {kind.__name__}, got {value!r}") from e


def config_from_dict(cfg, base_dir="."):
    known = set(RunConfig.__dataclass_fields__)
    unknown = sorted(set(cfg) - known)
    if unknown:
        raise ConfigError(f"unknown configuration keys: {', '.join(unknown)}")

    grid = cfg.get("grid", [8, 4])
    if not isinstance(grid, (list, tuple)) or len(grid) != 2:
        raise ConfigError("grid must be [N_s, N_n]")

    envelope = cfg.get("envelope", {"family": "gaussian"})
    if isinstance(envelope, str):
        envelope = {"family": envelope}
    if not isinstance(envelope, dict):
        raise ConfigError("envelope must be a family name or a {family, params} mapping")
    if not isinstance(envelope.get("params") or {}, dict):
        raise ConfigError("envelope params must be a mapping")
    if envelope.get("family") not in ENVELOPE_FAMILIES:
        raise ConfigError(f"unknown envelope family {envelope.get('family')!r}")
    envelope = {"family": envelope["family"], "params": dict(envelope.get("params") or {})}

    raw_inputs = cfg.get("inputs", [{"chi": 0.0, "phi": 0.0}])
    if not isinstance(raw_inputs, (list, tuple)):
        raise ConfigError("inputs must be a list of {chi, phi} mappings")
    inputs = []
    for item in raw_inputs:
        try:
            chi, phi = float(item.get("chi", 0.0)), float(item.get("phi", 0.0))
        except (AttributeError, TypeError, ValueError) as e:
            raise ConfigError("inputs must be a list of {chi, phi} mappings") from e
        if not (math.isfinite(chi) and math.isfinite(phi)):
            raise ConfigError("input angles must be finite")
        inputs.append((chi, phi))
    if len(inputs) not in (1, 2):
        raise ConfigError("one or two qubit inputs are supported")

    weight = cfg.get("weight", "constant")
    weight = WEIGHT_ALIASES.get(weight, weight) if isinstance(weight, str) else weight
    if weight not in WEIGHT_FAMILIES or weight == "custom":
        raise ConfigError(f"unknown weight family {weight!r}")
    backend = cfg.get("backend", "exact")
    if backend not in BACKENDS:
        raise ConfigError(f"unknown backend {backend!r}")
    normalization = cfg.get("pair_normalization", "unitary")
    if normalization not in NORMALIZATIONS:
        raise ConfigError(f"unknown pair normalization {normalization!r}")

    sweep = cfg.get("sweep") or {}
    if not isinstance(sweep, dict):
        raise ConfigError("sweep must be a mapping")
    sweep = dict(sweep)
    if "sigma_theta" in sweep:
        try:
            sweep["sigma_theta"] = [float(s) for s in sweep["sigma_theta"]]
        except (TypeError, ValueError) as e:
            raise ConfigError("sweep.sigma_theta must be a list of numbers") from e
        if not all(math.isfinite(s) and s > 0 for s in sweep["sigma_theta"]):
            raise ConfigError("sweep.sigma_theta values must be positive and finite")

    workers = _scalar(cfg, "workers", 1, int)
    if workers < 1:
        raise ConfigError("workers must be >= 1")

    rc = RunConfig(
        grid=(grid[0], grid[1]),
        max_dimension=_scalar(cfg, "max_dimension", MAX_DIMENSION, int),
        envelope=envelope,
        inputs=tuple(inputs),
        weight=weight,
        backend=backend,
        circuit=_resolve(cfg.get("circuit"), base_dir),
        pair_normalization=normalization,
        initial_state=_resolve(cfg.get("initial_state"), base_dir),
        sweep=sweep,
        seed=_scalar(cfg, "seed", 42, int),
        workers=workers,
        out=_resolve(cfg.get("out", "runs"), base_dir),
        dump_states=bool(cfg.get("dump_states", False)),
        invariant_tolerance=_scalar(cfg, "invariant_tolerance", 1e-10, float),
    )
    try:
        rc.make_grid()
    except ModularError as e:
        raise ConfigError(f"invalid grid {list(grid)}: {e}") from e
    for p in (rc.circuit, rc.initial_state):
        if p is not None and not p.exists():
            raise ConfigError(f"referenced file does not exist: {p}")
    logger.debug("loaded config grid=%s backend=%s weight=%s", rc.grid, rc.backend, rc.weight)
    return rc
