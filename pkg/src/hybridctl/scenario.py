"""Scenario configuration and its flat INI file format.

A scenario bundles the plant ratings, the three stochastic profiles,
the study horizon and weights, the steady control schedule used by the
control-deviation cost, and optionally the controller parameters.  All
fields have nominal defaults, so a scenario file only needs to list
overrides.  Times and increments in schedule strings are written as
``t:value`` pairs separated by commas.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, replace
from pathlib import Path

from .controllers import ControllerParams, PARAM_CLASSES, params_from_text
from .plant import COMPONENTS, PlantConfig
from .profiles import (PROFILE_FACTORIES, ProfileSpec, Schedule, make_load,
                       make_solar, make_wind)

DEFAULT_USS: Schedule = ((0.0, 0.81), (40.0, 0.17), (80.0, 1.12))

# Slew bounds used by the rate-limit study (per unit power per second).
RATE_LIMIT_DEFAULTS = {"deg": 0.001, "fess": 0.02, "bess": 0.005, "uc": 1.2}


@dataclass
class ScenarioConfig:
    plant: PlantConfig = field(default_factory=PlantConfig)
    wind: ProfileSpec = field(default_factory=make_wind)
    solar: ProfileSpec = field(default_factory=make_solar)
    load: ProfileSpec = field(default_factory=make_load)
    controller: ControllerParams | None = None
    t_max: float = 120.0
    step: float = 0.01
    noise_dt: float | None = None
    w1: float = 1.0
    w2: float = 1.0
    u_ss: Schedule = DEFAULT_USS
    error_sign: float = -1.0
    master_seed: int = 0
    realizations: int = 4

    def __post_init__(self):
        if self.step <= 0 or self.t_max <= 0:
            raise ValueError("t_max and step must be positive")
        if self.realizations < 1:
            raise ValueError("realizations must be >= 1")
        if self.error_sign not in (-1.0, 1.0):
            raise ValueError("error_sign must be +1 or -1")
        if self.noise_dt is not None:
            ratio = self.noise_dt / self.step
            if abs(ratio - round(ratio)) > 1e-9 or round(ratio) < 1:
                raise ValueError("noise_dt must be a positive multiple of "
                                 "step")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_max / self.step))

    @property
    def noise_stride(self) -> int:
        if self.noise_dt is None:
            return 1
        return int(round(self.noise_dt / self.step))

    def with_controller(self, params: ControllerParams) -> "ScenarioConfig":
        return replace(self, controller=params)

    def with_plant(self, plant: PlantConfig) -> "ScenarioConfig":
        return replace(self, plant=plant)

    def profile_specs(self) -> tuple[ProfileSpec, ProfileSpec, ProfileSpec]:
        return (self.wind, self.solar, self.load)


def _format_schedule(schedule: Schedule) -> str:
    return ", ".join(f"{t:g}:{v:g}" for t, v in schedule)


def _parse_schedule(text: str) -> Schedule:
    text = text.strip()
    if not text:
        return ()
    entries = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        try:
            t_str, v_str = chunk.split(":")
            entries.append((float(t_str), float(v_str)))
        except ValueError as exc:
            raise ValueError(f"malformed schedule entry {chunk!r}") from exc
    return tuple(entries)


_PLANT_FLOAT_KEYS = (
    "k_wtg", "t_wtg", "k_solar", "t_solar", "k_turbine", "t_turbine",
    "k_ae", "t_ae", "k_fc", "t_fc", "k_deg", "t_deg", "k_fess", "t_fess",
    "k_bess", "t_bess", "k_uc", "t_uc", "kn", "inertia", "damping",
    "storage_balance_sign",
)

_PROFILE_FLOAT_KEYS = ("eta", "beta", "delta", "g1", "tau1", "g2", "tau2")


def load_scenario(path: str | Path) -> ScenarioConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"scenario file not found: {path}")
    parser.read(path)

    cfg = ScenarioConfig()
    sim_kw: dict = {}
    if parser.has_section("simulation"):
        sec = parser["simulation"]
        for key, cast in (("t_max", float), ("step", float),
                          ("noise_dt", float), ("w1", float), ("w2", float),
                          ("error_sign", float), ("seed", int),
                          ("realizations", int)):
            if key in sec:
                target = "master_seed" if key == "seed" else key
                sim_kw[target] = cast(sec[key])
        if "uss" in sec:
            sim_kw["u_ss"] = _parse_schedule(sec["uss"])

    plant_kw: dict = {}
    if parser.has_section("plant"):
        sec = parser["plant"]
        for key in _PLANT_FLOAT_KEYS:
            if key in sec:
                plant_kw[key] = float(sec[key])
        if "disconnected" in sec:
            names = [n.strip() for n in sec["disconnected"].split(",")
                     if n.strip()]
            connected = {name: True for name in COMPONENTS}
            for name in names:
                if name not in COMPONENTS:
                    raise ValueError(f"unknown component {name!r}")
                connected[name] = False
            plant_kw["connected"] = connected
        if "rate_limits" in sec:
            limits = {}
            for chunk in sec["rate_limits"].split(","):
                chunk = chunk.strip()
                if not chunk:
                    continue
                name, value = chunk.split(":")
                limits[name.strip()] = float(value)
            plant_kw["rate_limits"] = limits
    plant = PlantConfig(**plant_kw)

    profiles = {}
    for pname in ("wind", "solar", "load"):
        spec = PROFILE_FACTORIES[pname]()
        section = f"profile.{pname}"
        if parser.has_section(section):
            sec = parser[section]
            kw: dict = {}
            for key in _PROFILE_FLOAT_KEYS:
                if key in sec:
                    kw[key] = float(sec[key])
            if "gamma" in sec:
                kw["gamma"] = _parse_schedule(sec["gamma"])
            if "additive" in sec:
                kw["additive"] = _parse_schedule(sec["additive"])
            spec = replace(spec, **kw)
        profiles[pname] = spec

    controller = None
    if parser.has_section("controller"):
        sec = parser["controller"]
        text = "\n".join(f"{k} = {v}" for k, v in sec.items())
        controller = params_from_text(text)

    return ScenarioConfig(plant=plant, wind=profiles["wind"],
                          solar=profiles["solar"], load=profiles["load"],
                          controller=controller, **sim_kw)


def save_scenario(cfg: ScenarioConfig, path: str | Path) -> None:
    parser = configparser.ConfigParser()
    parser["simulation"] = {
        "t_max": f"{cfg.t_max:g}",
        "step": f"{cfg.step:g}",
        "w1": f"{cfg.w1:g}",
        "w2": f"{cfg.w2:g}",
        "error_sign": f"{cfg.error_sign:g}",
        "seed": str(cfg.master_seed),
        "realizations": str(cfg.realizations),
        "uss": _format_schedule(cfg.u_ss),
    }
    if cfg.noise_dt is not None:
        parser["simulation"]["noise_dt"] = f"{cfg.noise_dt:g}"

    plant_sec = {key: f"{getattr(cfg.plant, key):g}"
                 for key in _PLANT_FLOAT_KEYS}
    disconnected = [n for n in COMPONENTS
                    if not cfg.plant.connected.get(n, True)]
    if disconnected:
        plant_sec["disconnected"] = ", ".join(disconnected)
    if cfg.plant.rate_limits:
        plant_sec["rate_limits"] = ", ".join(
            f"{name}:{value:g}" for name, value in
            sorted(cfg.plant.rate_limits.items()))
    parser["plant"] = plant_sec

    for pname in ("wind", "solar", "load"):
        spec: ProfileSpec = getattr(cfg, pname)
        sec = {key: f"{getattr(spec, key):g}" for key in _PROFILE_FLOAT_KEYS}
        sec["gamma"] = _format_schedule(spec.gamma)
        if spec.additive:
            sec["additive"] = _format_schedule(spec.additive)
        parser[f"profile.{pname}"] = sec

    if cfg.controller is not None:
        sec = {"kind": cfg.controller.kind}
        for name in cfg.controller.field_names:
            sec[name] = f"{getattr(cfg.controller, name):.12g}"
        parser["controller"] = sec

    with open(path, "w") as fh:
        parser.write(fh)
