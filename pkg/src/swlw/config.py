"""Run configuration: flat INI sections, every key typed and validated.

Example::

    [grid]
    n = 64

    [time]
    dt = 1e-3
    t_end = 0.1
    diagnostic_interval = 10

    [scenario]
    name = smooth-random
    seed = 0

Unknown sections or keys, type mismatches and parameter violations are all
collected and reported together.
"""
from __future__ import annotations

import configparser
import warnings
from dataclasses import dataclass, field, fields

from .coupling import CouplingSpec
from .errors import ConfigError
from .fluid import BETA_THRESHOLD, FluidParams, beta_warning
from .magnetics import MagneticParams
from .state import ModelParams
from .stepper import StepConfig

SCENARIO_KEYS = {
    "equilibrium": {"amplitude": float, "kx": int, "ky": int, "rho": float},
    "smooth-random": {"seed": int, "kmax": int, "rho_min": float, "rho_max": float,
                      "u_amp": float, "H_amp": float, "psi_amp": float, "psi_kmax": int},
    "shear": {"U": float, "density_amp": float, "amplitude": float, "kx": int, "ky": int},
    "perturbed-pair": {"delta": float, "seed": int, "perturbation_seed": int},
}

_BOOL = {"true": True, "yes": True, "1": True, "on": True,
         "false": False, "no": False, "0": False, "off": False}


def _to_bool(text: str) -> bool:
    try:
        return _BOOL[text.strip().lower()]
    except KeyError:
        raise ValueError(f"not a boolean: {text!r}") from None


@dataclass(frozen=True)
class RunConfig:
    n: int = 64
    t_end: float = 0.1
    step: StepConfig = field(default_factory=StepConfig)
    model: ModelParams = field(default_factory=ModelParams)
    scenario: str = "equilibrium"
    scenario_params: dict = field(default_factory=dict)
    seed: int = 0
    output_dir: str = "out"
    snapshot_interval: int = 0
    warnings: tuple[str, ...] = ()

    def scenario_kwargs(self) -> dict:
        kw = dict(self.scenario_params)
        if self.scenario in ("smooth-random", "perturbed-pair"):
            kw.setdefault("seed", self.seed)
        for a, b in (("kx", "ky"),):
            if a in kw or b in kw:
                kw["k"] = (kw.pop(a, 1), kw.pop(b, 0))
        if "rho_min" in kw or "rho_max" in kw:
            kw["rho_range"] = (kw.pop("rho_min", 0.8), kw.pop("rho_max", 1.2))
        return kw


def _dataclass_keys(cls) -> dict:
    kinds = {"float": float, "int": int, "bool": _to_bool}
    out = {}
    for f in fields(cls):
        if f.name.startswith("_") or not f.init:
            continue
        t = f.type if isinstance(f.type, str) else f.type.__name__
        out[f.name] = kinds[t]
    return out


SECTIONS = {
    "grid": {"n": int},
    "time": {"dt": float, "t_end": float, "diagnostic_interval": int},
    "fluid": _dataclass_keys(FluidParams),
    "magnetic": _dataclass_keys(MagneticParams),
    "coupling": _dataclass_keys(CouplingSpec),
    "stepper": {k: v for k, v in _dataclass_keys(StepConfig).items()
                if k not in ("dt", "diagnostic_interval")},
    "output": {"dir": str, "snapshot_interval": int},
    "scenario": {"name": str, "seed": int},
}


def parse_config(text: str) -> RunConfig:
    """Parse and validate; raises :class:`ConfigError` listing every problem."""
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError([f"syntax: {exc}"]) from None

    problems: list[str] = []
    values: dict[str, dict] = {s: {} for s in SECTIONS}
    scen_name = cp.get("scenario", "name", fallback="equilibrium").strip()
    if scen_name not in SCENARIO_KEYS:
        problems.append(f"scenario.name: unknown scenario {scen_name!r} "
                        f"(available: {', '.join(SCENARIO_KEYS)})")
    scen_extra = SCENARIO_KEYS.get(scen_name, {})

    for section in cp.sections():
        if section not in SECTIONS:
            problems.append(f"{section}: unknown section")
            continue
        allowed = dict(SECTIONS[section])
        if section == "scenario":
            allowed.update(scen_extra)
        for key, raw in cp.items(section):
            if key not in allowed:
                problems.append(f"{section}.{key}: unknown key")
                continue
            conv = allowed[key]
            try:
                values[section][key] = conv(raw.strip()) if conv is not str else raw.strip()
            except ValueError:
                problems.append(f"{section}.{key}: expected {getattr(conv, '__name__', 'bool')}, "
                                f"got {raw!r}")

    notes: list[str] = []

    def build(label, cls, kw):
        try:
            if cls is FluidParams:
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore")
                    obj = cls(**kw)
                if obj.beta <= BETA_THRESHOLD:
                    notes.append(beta_warning(obj.beta))
                return obj
            return cls(**kw)
        except (ValueError, TypeError) as exc:
            for part in str(exc).split("; "):
                key = next((k for k in kw if k in part), None) or part.split()[0]
                problems.append(f"{label}.{key}: {part}")
            return None

    grid_n = values["grid"].get("n", 64)
    if grid_n < 8 or grid_n % 2:
        problems.append(f"grid.n: must be an even integer >= 8, got {grid_n}")
    t_end = values["time"].get("t_end", 0.1)
    if not t_end >= 0:
        problems.append(f"time.t_end: must be >= 0, got {t_end}")
    step_kw = dict(values["stepper"])
    for k in ("dt", "diagnostic_interval"):
        if k in values["time"]:
            step_kw[k] = values["time"][k]
    if "dt" in step_kw and not step_kw["dt"] > 0:
        problems.append(f"time.dt: must be > 0, got {step_kw['dt']}")
        step_kw.pop("dt")
    fluid = build("fluid", FluidParams, values["fluid"])
    magnetic = build("magnetic", MagneticParams, values["magnetic"])
    coupling = build("coupling", CouplingSpec, values["coupling"])
    step = build("stepper", StepConfig, step_kw)
    snap = values["output"].get("snapshot_interval", 0)
    if snap < 0:
        problems.append("output.snapshot_interval: must be >= 0")

    if problems:
        raise ConfigError(problems)
    scen = dict(values["scenario"])
    scen.pop("name", None)
    seed = scen.pop("seed", 0) if scen_name != "perturbed-pair" else scen.get("seed", 0)
    return RunConfig(
        n=grid_n, t_end=t_end, step=step,
        model=ModelParams(fluid=fluid, magnetic=magnetic, coupling=coupling),
        scenario=scen_name, scenario_params=scen, seed=seed,
        output_dir=values["output"].get("dir", "out"), snapshot_interval=snap,
        warnings=tuple(notes),
    )


def load_config(path) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError([f"cannot read {path}: {exc.strerror}"]) from None
    return parse_config(text)


def echo(cfg: RunConfig) -> dict:
    """Flat view of the effective configuration, defaults included."""
    out = {"grid.n": cfg.n, "time.t_end": cfg.t_end, "time.dt": cfg.step.dt,
           "time.diagnostic_interval": cfg.step.diagnostic_interval,
           "scenario.name": cfg.scenario, "scenario.seed": cfg.seed,
           "output.dir": cfg.output_dir, "output.snapshot_interval": cfg.snapshot_interval}
    for section, obj in (("fluid", cfg.model.fluid), ("magnetic", cfg.model.magnetic),
                         ("coupling", cfg.model.coupling), ("stepper", cfg.step)):
        for key in SECTIONS[section]:
            out[f"{section}.{key}"] = getattr(obj, key)
    for key, val in cfg.scenario_params.items():
        out[f"scenario.{key}"] = val
    return out
