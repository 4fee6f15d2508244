"""Tests for the strict YAML experiment configuration parser."""

import math

import numpy as np
import pytest

from qbcharge import config, gaussian
from qbcharge.config import ConfigError


def qubit_raw(**overrides):
    raw = dict(
        model="qubit",
        system=dict(omega=1.0, g=0.2, gamma=0.05, mu=0.5, n_bath=0.0),
        grid=dict(tau_in_units_of_pi_over_g=1.0, n_steps=400),
        shape={"kappa": 0.5, "lambda": 3.0},
        baseline=dict(F=0.5),
    )
    raw.update(overrides)
    return raw


def oscillator_raw(**overrides):
    raw = dict(
        model="oscillator",
        system=dict(omega=1.0, g=0.2, gamma=0.01, mu=0.1, n_bath=1.0),
        grid=dict(tau=10.0, n_steps=400),
        shape={"kappa": 0.01, "lambda": 1.0},
        target=dict(alpha=[0.5, -0.25]),
        baseline=dict(F=0.1),
    )
    raw.update(overrides)
    return raw


def test_parse_minimal_qubit_config():
    cfg = config.parse_config(qubit_raw())
    assert cfg.model == "qubit"
    assert cfg.system.g == 0.2
    assert cfg.grid.tau == pytest.approx(math.pi / 0.2)
    assert cfg.shape.lam == 3.0
    assert cfg.baseline_amplitude == 0.5
    assert cfg.target is None
    assert cfg.sweep is None
    assert cfg.seed == 1234


def test_parse_oscillator_config_builds_complex_target():
    cfg = config.parse_config(oscillator_raw())
    assert cfg.model == "oscillator"
    assert cfg.target == complex(0.5, -0.25)


def test_missing_system_field_names_the_field():
    raw = qubit_raw()
    del raw["system"]["g"]
    with pytest.raises(ConfigError, match="'g'"):
        config.parse_config(raw)


def test_missing_baseline_amplitude_rejected():
    raw = qubit_raw()
    raw["baseline"] = {}
    with pytest.raises(ConfigError, match="'F'"):
        config.parse_config(raw)


def test_unknown_top_level_key_rejected():
    with pytest.raises(ConfigError, match="bogus"):
        config.parse_config(qubit_raw(bogus=1))


def test_unknown_system_key_rejected():
    raw = qubit_raw()
    raw["system"]["detuning"] = 0.1
    with pytest.raises(ConfigError, match="detuning"):
        config.parse_config(raw)


def test_grid_requires_exactly_one_tau_spelling():
    raw = qubit_raw()
    raw["grid"] = dict(n_steps=100)
    with pytest.raises(ConfigError, match="tau"):
        config.parse_config(raw)
    raw["grid"] = dict(tau=1.0, tau_in_units_of_pi_over_g=1.0)
    with pytest.raises(ConfigError, match="tau"):
        config.parse_config(raw)


def test_tau_in_coupling_units_converts():
    raw = qubit_raw()
    raw["grid"] = dict(tau_in_units_of_pi_over_g=3.0, n_steps=100)
    cfg = config.parse_config(raw)
    assert cfg.grid.tau == pytest.approx(3.0 * math.pi / 0.2)


def test_non_numeric_parameter_rejected():
    raw = qubit_raw()
    raw["system"]["gamma"] = "strong"
    with pytest.raises(ConfigError, match="gamma"):
        config.parse_config(raw)


def test_boolean_is_not_a_number():
    raw = qubit_raw()
    raw["system"]["n_bath"] = True
    with pytest.raises(ConfigError, match="n_bath"):
        config.parse_config(raw)


def test_seed_must_be_integer():
    with pytest.raises(ConfigError, match="seed"):
        config.parse_config(qubit_raw(seed=1.5))


def test_oscillator_rejects_cells():
    raw = oscillator_raw()
    raw["system"]["cells"] = 3
    with pytest.raises(ConfigError, match="cells"):
        config.parse_config(raw)


def test_qubit_cells_accepted():
    raw = qubit_raw()
    raw["system"]["cells"] = 3
    cfg = config.parse_config(raw)
    assert cfg.system.cells == 3


def test_oscillator_target_alpha_must_be_pair():
    raw = oscillator_raw()
    raw["target"] = dict(alpha=[1.0])
    with pytest.raises(ConfigError, match="alpha"):
        config.parse_config(raw)


def test_qubit_rejects_unsupported_target_kind():
    raw = qubit_raw(target=dict(kind="squeezed"))
    with pytest.raises(ConfigError, match="squeezed"):
        config.parse_config(raw)


def test_sweep_parameter_validated():
    raw = qubit_raw(sweep=dict(parameter="coupling", values=[1, 2]))
    with pytest.raises(ConfigError, match="coupling"):
        config.parse_config(raw)
    raw = qubit_raw(sweep=dict(parameter="n_bath", values=[]))
    with pytest.raises(ConfigError, match="values"):
        config.parse_config(raw)
    cfg = config.parse_config(
        qubit_raw(sweep=dict(parameter="n_bath", values=[0, 0.5, 1])))
    assert cfg.sweep == {"parameter": "n_bath", "values": [0.0, 0.5, 1.0]}


def test_load_config_roundtrip(tmp_path):
    path = tmp_path / "exp.yaml"
    path.write_text(
        "model: qubit\n"
        "system: {omega: 1.0, g: 0.2, gamma: 0.05, mu: 0.5, n_bath: 0.0}\n"
        "grid: {tau_in_units_of_pi_over_g: 1.0, n_steps: 200}\n"
        "shape: {kappa: 0.5, lambda: 3.0}\n"
        "baseline: {F: 0.5}\n")
    cfg = config.load_config(str(path))
    assert cfg.grid.n_steps == 200


def test_load_config_reports_file_and_error(tmp_path):
    path = tmp_path / "bad.yaml"
    path.write_text("model: qubit\n")
    with pytest.raises(ConfigError, match="bad.yaml"):
        config.load_config(str(path))


def test_load_config_missing_file():
    with pytest.raises(ConfigError):
        config.load_config("/nonexistent/exp.yaml")


def test_oscillator_target_moments_coherent_displacement():
    alpha = complex(0.5, -0.25)
    omega = 1.3
    psi = config.oscillator_target_moments(alpha, omega)
    r = gaussian.first_moments(psi)
    assert r[0] == 0.0 and r[2] == 0.0
    assert r[1] == pytest.approx(math.sqrt(2.0 / omega) * alpha.real)
    assert r[3] == pytest.approx(math.sqrt(2.0 * omega) * alpha.imag)
    assert np.allclose(gaussian.covariance_matrix(psi),
                       gaussian.vacuum_covariance(omega))
    assert gaussian.battery_energy(psi, omega) == pytest.approx(
        omega * abs(alpha) ** 2)
