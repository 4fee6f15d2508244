"""Strict experiment configuration: YAML in, fully validated objects out.

Physical parameters carry no defaults — a config must state them explicitly.
Defaults exist only for numerical knobs (grid size, stopping rule, ramp
fractions, seed). Unknown keys anywhere are rejected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import yaml

from . import gaussian, lindblad
from .grids import TimeGrid
from .krotov import ShapeConfig, StoppingRule


class ConfigError(ValueError):
    """Invalid or incomplete experiment configuration."""


def _require(mapping: dict, key: str, section: str):
    if key not in mapping:
        raise ConfigError(f"{section}: missing required field '{key}'")
    return mapping[key]


def _reject_unknown(mapping: dict, allowed: set, section: str) -> None:
    unknown = set(mapping) - allowed
    if unknown:
        raise ConfigError(f"{section}: unknown key(s) {sorted(unknown)}")


def _number(value, section: str, key: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{section}.{key}: expected a number, got {value!r}")
    return float(value)


@dataclass
class ExperimentConfig:
    model: str
    system: object            # QubitSystemSpec or OscillatorSystemSpec
    grid: TimeGrid
    shape: ShapeConfig
    stopping: StoppingRule
    baseline_amplitude: float
    target: object            # qubit: None (excited battery); oscillator: complex alpha
    sweep: dict | None
    output: str | None
    seed: int
    raw: dict = field(repr=False, default_factory=dict)


_SYSTEM_KEYS = {"omega", "g", "gamma", "mu", "n_bath", "cells"}
_TOP_KEYS = {"model", "system", "grid", "shape", "target", "baseline",
             "stopping", "sweep", "output", "seed"}


def _parse_system(model: str, data: dict):
    _reject_unknown(data, _SYSTEM_KEYS, "system")
    for key in ("omega", "g", "gamma", "mu", "n_bath"):
        _number(_require(data, key, "system"), "system", key)
    if model == "qubit":
        return lindblad.QubitSystemSpec(
            omega=float(data["omega"]), g=float(data["g"]),
            gamma=float(data["gamma"]), mu=float(data["mu"]),
            n_bath=float(data["n_bath"]), cells=int(data.get("cells", 1)))
    if "cells" in data:
        raise ConfigError("system: 'cells' applies only to the qubit model")
    return gaussian.OscillatorSystemSpec(
        omega=float(data["omega"]), g=float(data["g"]),
        gamma=float(data["gamma"]), mu=float(data["mu"]),
        n_bath=float(data["n_bath"]))


def _parse_grid(data: dict, system) -> TimeGrid:
    _reject_unknown(data, {"tau", "tau_in_units_of_pi_over_g", "n_steps"}, "grid")
    has_tau = "tau" in data
    has_units = "tau_in_units_of_pi_over_g" in data
    if has_tau == has_units:
        raise ConfigError(
            "grid: exactly one of 'tau' or 'tau_in_units_of_pi_over_g' is required")
    if has_tau:
        tau = _number(data["tau"], "grid", "tau")
    else:
        tau = _number(data["tau_in_units_of_pi_over_g"], "grid",
                      "tau_in_units_of_pi_over_g") * math.pi / system.g
    return TimeGrid(tau, int(data.get("n_steps", 2000)))


def _parse_shape(data: dict) -> ShapeConfig:
    _reject_unknown(data, {"kappa", "lambda", "t_on_fraction", "t_off_fraction"},
                    "shape")
    return ShapeConfig(
        kappa=_number(_require(data, "kappa", "shape"), "shape", "kappa"),
        lam=_number(_require(data, "lambda", "shape"), "shape", "lambda"),
        t_on_fraction=float(data.get("t_on_fraction", 0.005)),
        t_off_fraction=float(data.get("t_off_fraction", 0.005)))


def _parse_stopping(data: dict) -> StoppingRule:
    _reject_unknown(data, {"max_iters", "delta_j_tol"}, "stopping")
    return StoppingRule(max_iters=int(data.get("max_iters", 500)),
                        delta_j_tol=float(data.get("delta_j_tol", 1e-7)))


def _parse_target(model: str, data: dict):
    if model == "qubit":
        _reject_unknown(data, {"kind"}, "target")
        kind = data.get("kind", "excited-battery")
        if kind != "excited-battery":
            raise ConfigError(f"target: unsupported qubit target '{kind}'")
        return None
    _reject_unknown(data, {"alpha"}, "target")
    alpha = _require(data, "alpha", "target")
    if (not isinstance(alpha, (list, tuple)) or len(alpha) != 2):
        raise ConfigError("target.alpha: expected [real, imag] pair")
    return complex(_number(alpha[0], "target", "alpha[0]"),
                   _number(alpha[1], "target", "alpha[1]"))


def _parse_sweep(data: dict) -> dict:
    _reject_unknown(data, {"parameter", "values"}, "sweep")
    parameter = _require(data, "parameter", "sweep")
    values = _require(data, "values", "sweep")
    if parameter not in ("n_bath", "lambda"):
        raise ConfigError(f"sweep: unsupported parameter '{parameter}'")
    if not isinstance(values, list) or not values:
        raise ConfigError("sweep.values: expected a non-empty list")
    return {"parameter": parameter,
            "values": [_number(v, "sweep", "values") for v in values]}


def parse_config(data: dict) -> ExperimentConfig:
    if not isinstance(data, dict):
        raise ConfigError("top level: expected a mapping")
    _reject_unknown(data, _TOP_KEYS, "top level")
    model = _require(data, "model", "top level")
    if model not in ("qubit", "oscillator"):
        raise ConfigError(f"model: expected 'qubit' or 'oscillator', got {model!r}")
    system = _parse_system(model, dict(_require(data, "system", "top level")))
    grid = _parse_grid(dict(_require(data, "grid", "top level")), system)
    shape = _parse_shape(dict(_require(data, "shape", "top level")))
    stopping = _parse_stopping(dict(data.get("stopping", {})))
    baseline = dict(_require(data, "baseline", "top level"))
    _reject_unknown(baseline, {"F"}, "baseline")
    f_amp = _number(_require(baseline, "F", "baseline"), "baseline", "F")
    target = _parse_target(model, dict(data.get("target", {})))
    sweep = _parse_sweep(dict(data["sweep"])) if data.get("sweep") else None
    output = data.get("output")
    if output is not None and not isinstance(output, str):
        raise ConfigError("output: expected a directory path string")
    seed = data.get("seed", 1234)
    if isinstance(seed, bool) or not isinstance(seed, int):
        raise ConfigError("seed: expected an integer")
    return ExperimentConfig(model=model, system=system, grid=grid, shape=shape,
                            stopping=stopping, baseline_amplitude=f_amp,
                            target=target, sweep=sweep, output=output,
                            seed=seed, raw=data)


def load_config(path: str) -> ExperimentConfig:
    try:
        with open(path) as fh:
            data = yaml.safe_load(fh)
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    except OSError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    try:
        return parse_config(data)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def oscillator_target_moments(alpha: complex, omega: float) -> np.ndarray:
    """Target moment vector |0>_charger |alpha>_battery."""
    r = np.zeros(4)
    r[1] = math.sqrt(2.0 / omega) * alpha.real
    r[3] = math.sqrt(2.0 * omega) * alpha.imag
    return gaussian.moment_vector(r, gaussian.vacuum_covariance(omega))


