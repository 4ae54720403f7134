"""JSON configuration schema for systems, plant and simulation settings.

A config file has a required "controller" section and optional "plant"
and "sim" sections.  Type-1 variables carry per-term vertex lists;
interval type-2 variables carry either explicit per-term "lower"/"upper"
vertex lists or a variable-level "delta" blur shorthand applied to plain
"vertices".  Both forms load to identical systems when equivalent.
Rules are a 2-D consequent grid indexed by the two input variables' term
labels, and every cell must be present.

Floats survive a load/save cycle bit-exactly (shortest-repr decimals),
and saving normalizes blur shorthand to the explicit form, so a second
save is byte-identical to the first.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from typing import Any, Union

from .core import LinguisticVariable, PiecewiseLinearMF, RuleBase, T1System
from .decomposed import DecomposedSystem, IT2Set, IT2Variable, blur_variable, decompose
from .pendulum import PlantParams, SimConfig

__all__ = ["ConfigError", "SimSettings", "LoadedConfig", "load_config", "dump_config", "save_config"]

DEFAULT_GRID_SIZE = 1001


class ConfigError(ValueError):
    """Schema violation; the message names the offending key."""

    def __init__(self, key: str, problem: str):
        self.key = key
        super().__init__(f"config key {key!r}: {problem}")


@dataclass(frozen=True)
class SimSettings:
    dt: float = 1e-3
    duration: float = 5.0
    theta0: float = 0.1
    theta_dot0: float = 0.0
    noise_sigma: float = 0.0
    seed: int = 0
    saturation: float = math.pi / 4


@dataclass(frozen=True, eq=False)
class LoadedConfig:
    controller_type: str  # "t1" | "it2"
    system: Union[T1System, DecomposedSystem]
    plant: PlantParams = field(default_factory=PlantParams)
    sim: SimSettings = field(default_factory=SimSettings)

    def sim_config(self, **overrides: Any) -> SimConfig:
        """Assemble a runnable SimConfig; keyword overrides win over the file."""
        settings = replace(self.sim, **{k: v for k, v in overrides.items() if v is not None})
        return SimConfig(
            controller=self.system,
            dt=settings.dt,
            duration=settings.duration,
            theta0=settings.theta0,
            theta_dot0=settings.theta_dot0,
            noise_sigma=settings.noise_sigma,
            rng_seed=settings.seed,
            saturation=settings.saturation,
            plant=self.plant,
        )


def _get(mapping: dict, key: str, path: str, kind: type, required: bool = True, default: Any = None) -> Any:
    if key not in mapping:
        if required:
            raise ConfigError(f"{path}.{key}" if path else key, "missing")
        return default
    value = mapping[key]
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if not isinstance(value, kind) or isinstance(value, bool) and kind is not bool:
        raise ConfigError(f"{path}.{key}" if path else key, f"expected {kind.__name__}")
    return value


def _parse_vertices(raw: Any, path: str) -> PiecewiseLinearMF:
    if not isinstance(raw, list) or len(raw) < 2:
        raise ConfigError(path, "expected a list of at least 2 [x, mu] pairs")
    verts = []
    for i, pair in enumerate(raw):
        if not isinstance(pair, list) or len(pair) != 2 or not all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in pair
        ):
            raise ConfigError(f"{path}[{i}]", "expected an [x, mu] number pair")
        verts.append((float(pair[0]), float(pair[1])))
    try:
        return PiecewiseLinearMF(tuple(verts))
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from None


def _parse_t1_variable(raw: Any, path: str) -> LinguisticVariable:
    if not isinstance(raw, dict):
        raise ConfigError(path, "expected an object")
    name = _get(raw, "name", path, str)
    universe = _parse_universe(raw, path)
    terms_raw = _get(raw, "terms", path, list)
    terms = []
    for i, term in enumerate(terms_raw):
        tpath = f"{path}.terms[{i}]"
        if not isinstance(term, dict):
            raise ConfigError(tpath, "expected an object")
        label = _get(term, "label", tpath, str)
        mf = _parse_vertices(_get(term, "vertices", tpath, list), f"{tpath}.vertices")
        terms.append((label, mf))
    try:
        return LinguisticVariable(name, universe, tuple(terms))
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from None


def _parse_universe(raw: dict, path: str) -> tuple[float, float]:
    uni = _get(raw, "universe", path, list)
    if len(uni) != 2 or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in uni):
        raise ConfigError(f"{path}.universe", "expected [lo, hi] numbers")
    return float(uni[0]), float(uni[1])


def _parse_it2_variable(raw: Any, path: str) -> IT2Variable:
    if not isinstance(raw, dict):
        raise ConfigError(path, "expected an object")
    name = _get(raw, "name", path, str)
    universe = _parse_universe(raw, path)
    terms_raw = _get(raw, "terms", path, list)
    if "delta" in raw:
        # blur shorthand: plain vertex lists widened/narrowed on load
        delta = _get(raw, "delta", path, float)
        base = _parse_t1_variable({"name": name, "universe": list(universe), "terms": terms_raw}, path)
        try:
            return blur_variable(base, delta)
        except ValueError as exc:
            raise ConfigError(f"{path}.delta", str(exc)) from None
    sets = []
    for i, term in enumerate(terms_raw):
        tpath = f"{path}.terms[{i}]"
        if not isinstance(term, dict):
            raise ConfigError(tpath, "expected an object")
        label = _get(term, "label", tpath, str)
        lower = _parse_vertices(_get(term, "lower", tpath, list), f"{tpath}.lower")
        upper = _parse_vertices(_get(term, "upper", tpath, list), f"{tpath}.upper")
        try:
            sets.append(IT2Set(label, lower=lower, upper=upper))
        except ValueError as exc:
            raise ConfigError(tpath, str(exc)) from None
    try:
        return IT2Variable(name, universe, tuple(sets))
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from None


def _parse_rules(raw: Any, path: str) -> RuleBase:
    if not isinstance(raw, dict):
        raise ConfigError(path, "expected an object")
    rows = _get(raw, "rows", path, list)
    cols = _get(raw, "cols", path, list)
    table = _get(raw, "table", path, list)
    if len(table) != len(rows):
        raise ConfigError(f"{path}.table", f"expected {len(rows)} rows, got {len(table)}")
    for r, row in enumerate(table):
        if not isinstance(row, list) or len(row) != len(cols):
            raise ConfigError(f"{path}.table[{r}]", f"expected {len(cols)} entries")
        for c, cell in enumerate(row):
            if not isinstance(cell, str):
                raise ConfigError(f"{path}.table[{r}][{c}]", "expected a consequent label")
    try:
        return RuleBase.from_table([str(r) for r in rows], [str(c) for c in cols], table)
    except ValueError as exc:
        raise ConfigError(f"{path}.table", str(exc)) from None


def _parse_controller(raw: Any, path: str) -> tuple[str, Union[T1System, DecomposedSystem]]:
    if not isinstance(raw, dict):
        raise ConfigError(path, "expected an object")
    ctype = _get(raw, "type", path, str)
    if ctype not in ("t1", "it2"):
        raise ConfigError(f"{path}.type", f"expected 't1' or 'it2', got {ctype!r}")
    grid_size = int(_get(raw, "grid_size", path, int, required=False, default=DEFAULT_GRID_SIZE))
    inputs_raw = _get(raw, "inputs", path, list)
    if len(inputs_raw) != 2:
        raise ConfigError(f"{path}.inputs", "exactly 2 input variables required for a rule table")
    rules = _parse_rules(_get(raw, "rules", path, dict), f"{path}.rules")
    output_raw = _get(raw, "output", path, dict)
    try:
        if ctype == "t1":
            inputs = tuple(
                _parse_t1_variable(v, f"{path}.inputs[{i}]") for i, v in enumerate(inputs_raw)
            )
            output = _parse_t1_variable(output_raw, f"{path}.output")
            return ctype, T1System(inputs, output, rules, grid_size)
        it2_inputs = tuple(
            _parse_it2_variable(v, f"{path}.inputs[{i}]") for i, v in enumerate(inputs_raw)
        )
        out: Union[LinguisticVariable, IT2Variable]
        terms = output_raw.get("terms")
        explicit_it2 = isinstance(terms, list) and terms and isinstance(terms[0], dict) and "lower" in terms[0]
        if explicit_it2 or "delta" in output_raw:
            out = _parse_it2_variable(output_raw, f"{path}.output")
        else:
            out = _parse_t1_variable(output_raw, f"{path}.output")
        return ctype, decompose(it2_inputs, out, rules, grid_size)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from None


def _parse_plant(raw: Any, path: str) -> PlantParams:
    if raw is None:
        return PlantParams()
    if not isinstance(raw, dict):
        raise ConfigError(path, "expected an object")
    gravity = _get(raw, "gravity", path, float, required=False, default=9.8)
    try:
        return PlantParams(gravity=gravity)
    except ValueError as exc:
        raise ConfigError(f"{path}.gravity", str(exc)) from None


def _parse_sim(raw: Any, path: str) -> SimSettings:
    if raw is None:
        return SimSettings()
    if not isinstance(raw, dict):
        raise ConfigError(path, "expected an object")
    defaults = SimSettings()
    values = {}
    for key_name, kind in (
        ("dt", float),
        ("duration", float),
        ("theta0", float),
        ("theta_dot0", float),
        ("noise_sigma", float),
        ("seed", int),
        ("saturation", float),
    ):
        values[key_name] = _get(raw, key_name, path, kind, required=False, default=getattr(defaults, key_name))
    settings = SimSettings(**values)
    if not settings.dt > 0:
        raise ConfigError(f"{path}.dt", "must be positive")
    if settings.duration < settings.dt:
        raise ConfigError(f"{path}.duration", "must cover at least one step")
    if settings.noise_sigma < 0:
        raise ConfigError(f"{path}.noise_sigma", "must be nonnegative")
    if not settings.saturation > 0:
        raise ConfigError(f"{path}.saturation", "must be positive")
    return settings


def load_config(path) -> LoadedConfig:
    """Parse and validate a config file; raises ConfigError naming the key."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(str(path), "file not found") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(str(path), f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError("<root>", "expected a JSON object")
    ctype, system = _parse_controller(_get(doc, "controller", "", dict), "controller")
    plant = _parse_plant(doc.get("plant"), "plant")
    sim = _parse_sim(doc.get("sim"), "sim")
    return LoadedConfig(controller_type=ctype, system=system, plant=plant, sim=sim)


def _dump_vertices(mf: PiecewiseLinearMF) -> list[list[float]]:
    return [[x, m] for x, m in mf.vertices]


def _dump_t1_variable(var: LinguisticVariable) -> dict:
    return {
        "name": var.name,
        "universe": list(var.universe),
        "terms": [{"label": label, "vertices": _dump_vertices(mf)} for label, mf in var.terms],
    }


def _dump_it2_variable(upper: LinguisticVariable, lower: LinguisticVariable) -> dict:
    return {
        "name": upper.name,
        "universe": list(upper.universe),
        "terms": [
            {
                "label": label,
                "lower": _dump_vertices(lower.term(label)),
                "upper": _dump_vertices(upper.term(label)),
            }
            for label in upper.labels
        ],
    }


def _dump_rules(rb: RuleBase, row_var: LinguisticVariable, col_var: LinguisticVariable) -> dict:
    by_antecedent = {rule.antecedent: rule.consequent for rule in rb.rules}
    rows = list(row_var.labels)
    cols = list(col_var.labels)
    try:
        table = [[by_antecedent[(r, c)] for c in cols] for r in rows]
    except KeyError as exc:
        raise ValueError(f"rule table is not a complete grid: missing {exc.args[0]}") from None
    return {"rows": rows, "cols": cols, "table": table}


def dump_config(cfg: LoadedConfig) -> dict:
    """Canonical plain-data form of a loaded config (explicit IT2 bounds)."""
    system = cfg.system
    if isinstance(system, T1System):
        controller = {
            "type": "t1",
            "grid_size": system.grid_size,
            "inputs": [_dump_t1_variable(v) for v in system.inputs],
            "output": _dump_t1_variable(system.output),
            "rules": _dump_rules(system.rulebase, system.inputs[0], system.inputs[1]),
        }
    else:
        up, low = system.upper_path, system.lower_path
        same_output = up.output == low.output
        controller = {
            "type": "it2",
            "grid_size": up.grid_size,
            "inputs": [
                _dump_it2_variable(uv, lv) for uv, lv in zip(up.inputs, low.inputs)
            ],
            "output": _dump_t1_variable(up.output)
            if same_output
            else _dump_it2_variable(up.output, low.output),
            "rules": _dump_rules(up.rulebase, up.inputs[0], up.inputs[1]),
        }
    return {
        "controller": controller,
        "plant": {"gravity": cfg.plant.gravity},
        "sim": {
            "dt": cfg.sim.dt,
            "duration": cfg.sim.duration,
            "theta0": cfg.sim.theta0,
            "theta_dot0": cfg.sim.theta_dot0,
            "noise_sigma": cfg.sim.noise_sigma,
            "seed": cfg.sim.seed,
            "saturation": cfg.sim.saturation,
        },
    }


def save_config(cfg: LoadedConfig, path) -> None:
    with open(path, "w") as fh:
        json.dump(dump_config(cfg), fh, indent=2)
        fh.write("\n")
