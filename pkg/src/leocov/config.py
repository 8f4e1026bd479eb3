"""Experiment configuration files.

Configs are YAML documents. Every dimensional quantity is a string carrying
its unit (``"15 dBW"``, ``"500 km"``); bare numbers are rejected for those
keys. Decibel values are converted to linear units here and nowhere else.
The README documents the full grammar.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Any, Optional

import yaml

from .channel import LinkBudget, SRFadingParams, Thresholds
from .coverage import SystemConfig
from .geometry import EARTH_RADIUS_M, ConstellationConfig, DistributionVariant, Shell
from .montecarlo import MCConfig

SWEEP_VARIABLES = ("threshold", "gw_density", "abs_distance", "altitude", "count")
ENGINES = ("analytic", "mc", "both")

_LENGTH = {"m": 1.0, "km": 1e3}
_FREQ = {"Hz": 1.0, "kHz": 1e3, "MHz": 1e6, "GHz": 1e9}
_DENSITY = {"/m2": 1.0, "m^-2": 1.0, "/km2": 1e-6, "km^-2": 1e-6}
_QUANTITY = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*(\S+)\s*$")


class ConfigError(ValueError):
    """A config document failed to parse or validate; the message names the key."""


def _split(value: Any, key: str) -> tuple[float, str]:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        raise ConfigError(f"{key}: unit missing in {value!r}")
    m = _QUANTITY.match(str(value))
    if not m:
        raise ConfigError(f"{key}: cannot read quantity {value!r} (expected '<number> <unit>')")
    return float(m.group(1)), m.group(2)


def _scaled(value, key, table, kind):
    x, unit = _split(value, key)
    if unit not in table:
        raise ConfigError(f"{key}: unit {unit!r} is not a {kind} unit ({', '.join(table)})")
    return x * table[unit]


def length(value, key="length") -> float:
    return _scaled(value, key, _LENGTH, "length")


def frequency(value, key="frequency") -> float:
    return _scaled(value, key, _FREQ, "frequency")


def density(value, key="density") -> float:
    return _scaled(value, key, _DENSITY, "density")


def power(value, key="power") -> float:
    x, unit = _split(value, key)
    if unit == "W":
        return x
    if unit == "mW":
        return x * 1e-3
    if unit == "dBW":
        return 10 ** (x / 10)
    if unit == "dBm":
        return 10 ** ((x - 30) / 10)
    raise ConfigError(f"{key}: unit {unit!r} is not a power unit (W, mW, dBW, dBm)")


def power_ratio(value, key="ratio") -> float:
    x, unit = _split(value, key)
    if unit in ("dB", "dBi"):
        return 10 ** (x / 10)
    if unit == "lin":
        return x
    raise ConfigError(f"{key}: unit {unit!r} is not a ratio unit (dB, dBi, lin)")


def amplitude_ratio(value, key="amplitude", convention="amplitude") -> float:
    """Amplitude factor from dB: ``10**(x/20)``, or ``10**(x/10)`` under the power convention."""
    x, unit = _split(value, key)
    if unit == "lin":
        return x
    if unit != "dB":
        raise ConfigError(f"{key}: unit {unit!r} is not an amplitude unit (dB, lin)")
    if convention == "amplitude":
        return 10 ** (x / 20)
    if convention == "power":
        return 10 ** (x / 10)
    raise ConfigError(f"rain_convention: expected 'amplitude' or 'power', got {convention!r}")


def _number(value, key, integer=False):
    if isinstance(value, bool):
        raise ConfigError(f"{key}: expected a number, got {value!r}")
    try:
        x = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{key}: expected a number, got {value!r}") from None
    if integer:
        if x != int(x):
            raise ConfigError(f"{key}: expected an integer, got {value!r}")
        return int(x)
    return x


def _section(doc: dict, name: str) -> dict:
    sec = doc.get(name) or {}
    if not isinstance(sec, dict):
        raise ConfigError(f"{name}: expected a mapping")
    return sec


def _reject_unknown(sec: dict, allowed, name):
    extra = set(sec) - set(allowed)
    if extra:
        raise ConfigError(f"{name}: unknown key(s) {', '.join(sorted(map(str, extra)))}")


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    values: tuple[float, ...]    # as written, in ``unit``
    unit: str
    grid: tuple[float, ...]      # SI / linear

    @property
    def column(self) -> str:
        return f"{self.variable}_{self.unit}" if self.unit else self.variable


@dataclass(frozen=True)
class ExperimentSpec:
    system: SystemConfig
    abs_distance: float = 2_000.0
    sweep: Optional[SweepSpec] = None
    engines: str = "analytic"
    mc: MCConfig = field(default_factory=MCConfig)
    output: Optional[str] = None
    name: str = "experiment"

    def echo(self) -> dict:
        """Fully resolved, linear-unit view of the spec for output headers."""
        s = self.system
        return {
            "name": self.name,
            "constellation": {
                "earth_radius_m": s.constellation.earth_radius,
                "shells": [{"altitude_m": sh.altitude, "count": sh.count}
                           for sh in s.constellation.shells],
            },
            "link": dict(vars(s.budget)),
            "thresholds": dict(vars(s.thresholds)),
            "gw_density_per_m2": s.gw_density,
            "fading": dict(vars(s.sr)),
            "variant": s.variant.value,
            "abs_distance_m": self.abs_distance,
            "sweep": None if self.sweep is None else {
                "variable": self.sweep.variable, "unit": self.sweep.unit,
                "values": list(self.sweep.values), "grid": list(self.sweep.grid),
            },
            "engines": self.engines,
            "montecarlo": dict(vars(self.mc)),
        }


def _parse_constellation(doc) -> ConstellationConfig:
    sec = _section(doc, "constellation")
    _reject_unknown(sec, ("earth_radius", "shells"), "constellation")
    re_ = length(sec["earth_radius"], "constellation.earth_radius") if "earth_radius" in sec else EARTH_RADIUS_M
    raw = sec.get("shells", [{"altitude": "500 km", "count": 50}])
    if not isinstance(raw, list) or not raw:
        raise ConfigError("constellation.shells: expected a non-empty list")
    shells = []
    for i, item in enumerate(raw):
        key = f"constellation.shells[{i}]"
        if not isinstance(item, dict) or set(item) != {"altitude", "count"}:
            raise ConfigError(f"{key}: expected keys 'altitude' and 'count'")
        a = length(item["altitude"], f"{key}.altitude")
        n = _number(item["count"], f"{key}.count", integer=True)
        try:
            shells.append(Shell(a, n))
        except ValueError as e:
            raise ConfigError(f"{key}: {e}") from None
    try:
        return ConstellationConfig(tuple(shells), re_)
    except ValueError as e:
        raise ConfigError(f"constellation: {e}") from None


_LINK_KEYS = ("carrier_frequency", "rho_s", "rho_g", "rho_a", "sigma2_g", "sigma2_u",
              "gr2", "rain", "rain_convention", "xi", "alpha")


def _parse_link(doc) -> LinkBudget:
    sec = _section(doc, "link")
    _reject_unknown(sec, _LINK_KEYS, "link")
    kw = {}
    if "carrier_frequency" in sec:
        kw["carrier_freq"] = frequency(sec["carrier_frequency"], "link.carrier_frequency")
    rho_s = power(sec.get("rho_s", "15 dBW"), "link.rho_s")
    kw["rho_s"] = rho_s
    # equal transmit powers unless overridden
    kw["rho_g"] = power(sec["rho_g"], "link.rho_g") if "rho_g" in sec else rho_s
    kw["rho_a"] = power(sec["rho_a"], "link.rho_a") if "rho_a" in sec else rho_s
    for k in ("sigma2_g", "sigma2_u"):
        if k in sec:
            kw[k] = power(sec[k], f"link.{k}")
    if "gr2" in sec:
        kw["gr2"] = power_ratio(sec["gr2"], "link.gr2")
    conv = sec.get("rain_convention", "amplitude")
    kw["rain_s"] = amplitude_ratio(sec.get("rain", "-3.125 dB"), "link.rain", conv)
    if "xi" in sec:
        # xi**2 is a power gain, so dB values follow the amplitude rule
        kw["xi"] = amplitude_ratio(sec["xi"], "link.xi", "amplitude")
    if "alpha" in sec:
        kw["alpha"] = _number(sec["alpha"], "link.alpha")
    try:
        return LinkBudget(**kw)
    except ValueError as e:
        raise ConfigError(f"link: {e}") from None


def _parse_thresholds(doc) -> Thresholds:
    sec = _section(doc, "thresholds")
    _reject_unknown(sec, ("gamma", "gamma_g", "gamma_u"), "thresholds")
    common = power_ratio(sec["gamma"], "thresholds.gamma") if "gamma" in sec else 1.0
    g = power_ratio(sec["gamma_g"], "thresholds.gamma_g") if "gamma_g" in sec else common
    u = power_ratio(sec["gamma_u"], "thresholds.gamma_u") if "gamma_u" in sec else common
    try:
        return Thresholds(g, u)
    except ValueError as e:
        raise ConfigError(f"thresholds: {e}") from None


def _parse_fading(doc) -> SRFadingParams:
    sec = _section(doc, "fading")
    _reject_unknown(sec, ("omega", "b0", "m"), "fading")
    kw = {k: _number(v, f"fading.{k}") for k, v in sec.items()}
    try:
        return SRFadingParams(**kw)
    except ValueError as e:
        raise ConfigError(f"fading: {e}") from None


_SWEEP_UNITS = {
    "threshold": ("dB", lambda x, u: power_ratio(f"{x} {u}", "sweep.values")),
    "gw_density": ("/km2", lambda x, u: density(f"{x} {u}", "sweep.values")),
    "abs_distance": ("km", lambda x, u: length(f"{x} {u}", "sweep.values")),
    "altitude": ("km", lambda x, u: length(f"{x} {u}", "sweep.values")),
    "count": ("", lambda x, u: x),
}


def _parse_sweep(sec) -> SweepSpec:
    if not isinstance(sec, dict):
        raise ConfigError("sweep: expected a mapping")
    _reject_unknown(sec, ("variable", "unit", "values", "start", "stop", "num", "scale"), "sweep")
    var = sec.get("variable")
    if var not in SWEEP_VARIABLES:
        raise ConfigError(f"sweep.variable: expected one of {', '.join(SWEEP_VARIABLES)}, got {var!r}")
    default_unit, convert = _SWEEP_UNITS[var]
    unit = sec.get("unit", default_unit)
    if var == "count":
        if unit:
            raise ConfigError("sweep.unit: satellite counts take no unit")
    elif not unit:
        raise ConfigError(f"sweep.unit: unit missing for {var}")
    if "values" in sec:
        raw = sec["values"]
        if not isinstance(raw, list):
            raise ConfigError("sweep.values: expected a list")
        vals = [_number(v, "sweep.values", integer=(var == "count")) for v in raw]
    else:
        try:
            start = _number(sec["start"], "sweep.start")
            stop = _number(sec["stop"], "sweep.stop")
            num = _number(sec["num"], "sweep.num", integer=True)
        except KeyError as e:
            raise ConfigError(f"sweep: give 'values' or start/stop/num (missing {e.args[0]})") from None
        scale = sec.get("scale", "linear")
        if scale == "linear":
            vals = [start + (stop - start) * i / (num - 1) for i in range(num)] if num > 1 else [start]
        elif scale == "log":
            if start <= 0 or stop <= 0:
                raise ConfigError("sweep: log scale needs positive start/stop")
            ls, le = math.log10(start), math.log10(stop)
            vals = [10 ** (ls + (le - ls) * i / (num - 1)) for i in range(num)] if num > 1 else [start]
        else:
            raise ConfigError(f"sweep.scale: expected 'linear' or 'log', got {scale!r}")
        if var == "count":
            vals = [int(round(v)) for v in vals]
    if any(b <= a for a, b in zip(vals, vals[1:])):
        raise ConfigError("sweep.values: grid must be strictly increasing")
    grid = tuple(float(convert(v, unit)) for v in vals)
    if any(g <= 0 for g in grid):
        raise ConfigError(f"sweep.values: {var} values must be positive")
    return SweepSpec(var, tuple(vals), unit, grid)


def _parse_mc(doc) -> MCConfig:
    sec = _section(doc, "montecarlo")
    _reject_unknown(sec, ("trials", "seed", "batch", "association", "gw_sampling"), "montecarlo")
    kw = {}
    for k in ("trials", "seed", "batch"):
        if k in sec:
            kw[k] = _number(sec[k], f"montecarlo.{k}", integer=True)
    for k in ("association", "gw_sampling"):
        if k in sec:
            kw[k] = str(sec[k])
    try:
        return MCConfig(**kw)
    except ValueError as e:
        raise ConfigError(f"montecarlo: {e}") from None


_TOP = ("name", "constellation", "link", "thresholds", "gateways", "fading", "model",
        "abs_distance", "sweep", "engines", "montecarlo", "output")


def parse_config(text: str) -> ExperimentSpec:
    """Parse a YAML config; omitted fields take the built-in system defaults."""
    try:
        doc = yaml.safe_load(text) if text.strip() else {}
    except yaml.YAMLError as e:
        raise ConfigError(f"not valid YAML: {e}") from None
    if doc is None:
        doc = {}
    if not isinstance(doc, dict):
        raise ConfigError("top level must be a mapping")
    _reject_unknown(doc, _TOP, "config")

    gw = _section(doc, "gateways")
    _reject_unknown(gw, ("density",), "gateways")
    lam = density(gw["density"], "gateways.density") if "density" in gw else 1e-5
    model = _section(doc, "model")
    _reject_unknown(model, ("variant",), "model")
    try:
        variant = DistributionVariant(model.get("variant", "cap-area"))
    except ValueError:
        raise ConfigError(f"model.variant: expected 'cap-area' or 'arc-angle', got {model.get('variant')!r}") from None
    try:
        system = SystemConfig(_parse_constellation(doc), _parse_link(doc), _parse_thresholds(doc),
                              lam, _parse_fading(doc), variant)
    except ValueError as e:
        if isinstance(e, ConfigError):
            raise
        raise ConfigError(str(e)) from None

    abs_d = length(doc["abs_distance"], "abs_distance") if "abs_distance" in doc else 2_000.0
    if abs_d <= 0:
        raise ConfigError("abs_distance: must be positive")
    engines = doc.get("engines", "analytic")
    if engines not in ENGINES:
        raise ConfigError(f"engines: expected one of {', '.join(ENGINES)}, got {engines!r}")
    sweep = _parse_sweep(doc["sweep"]) if "sweep" in doc else None
    output = doc.get("output")
    return ExperimentSpec(system, abs_d, sweep, engines, _parse_mc(doc),
                          None if output is None else str(output), str(doc.get("name", "experiment")))


def load_config(path) -> ExperimentSpec:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
