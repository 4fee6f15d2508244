"""Ergotropy, passive states, drive energy accounting and quality factors."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


def passive_state(rho: np.ndarray, ham: np.ndarray) -> np.ndarray:
    """Lowest-energy state unitarily reachable from rho.

    Eigenvalues of rho sorted descending are paired with eigenvalues of the
    Hamiltonian sorted ascending; ties keep their original order, which does
    not change the passive energy.
    """
    p = np.linalg.eigvalsh(rho)[::-1]  # descending populations
    energies, vecs = np.linalg.eigh(ham)  # ascending energies
    return (vecs * p) @ vecs.conj().T


def energy(rho: np.ndarray, ham: np.ndarray) -> float:
    return float(np.real(np.trace(rho @ ham)))


def ergotropy(rho: np.ndarray, ham: np.ndarray) -> float:
    """Maximum work extractable by a cyclic unitary: E(rho) - E(passive)."""
    p = np.linalg.eigvalsh(rho)[::-1]
    e = np.linalg.eigvalsh(ham)
    passive_energy = float(p @ e)
    return max(energy(rho, ham) - passive_energy, 0.0)


def drive_cost(values, times: np.ndarray | None = None) -> float:
    """Integral of |eps(t)|^2 over the grid (trapezoidal rule).

    Accepts either a PulseProfile or an amplitude array plus matching times.
    """
    if times is None:
        values, times = values.values, values.grid.times
    values = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(values)):
        raise ValueError("pulse contains non-finite values")
    return float(np.trapezoid(values**2, times))


def oscillatory_cost_closed_form(tau: float, omega: float = 1.0) -> float:
    """Exact cost of the eps(t) = 2 cos(omega t) baseline drive."""
    if tau < 0:
        raise ValueError("tau must be non-negative")
    return 2.0 * tau + math.sin(2.0 * omega * tau) / omega


def quality_factors(erg_opt: float, erg_osc: float, cost_opt: float, cost_osc: float) -> tuple[float, float]:
    """Percent improvements (alpha_E, alpha_W) of optimized over baseline."""
    if erg_osc == 0.0 or cost_opt == 0.0:
        raise ZeroDivisionError(
            f"undefined quality factor: erg_osc={erg_osc}, cost_opt={cost_opt}"
        )
    alpha_e = (erg_opt / erg_osc - 1.0) * 100.0
    alpha_w = (cost_osc / cost_opt - 1.0) * 100.0
    return alpha_e, alpha_w


def bath_occupation(theta: float) -> float:
    """Bose-Einstein occupation for theta = omega/(K_B T); theta=inf means T=0."""
    if math.isinf(theta) and theta > 0:
        return 0.0
    if theta <= 0:
        raise ValueError(f"theta must be positive, got {theta}")
    return 1.0 / math.expm1(theta)


@dataclass
class ChargingReport:
    """Per-run record of a charging optimization, energies in units of omega."""

    times: np.ndarray
    battery_energy_opt: np.ndarray
    battery_ergotropy_opt: np.ndarray
    battery_energy_osc: np.ndarray
    battery_ergotropy_osc: np.ndarray
    pulse_cost: float
    baseline_cost: float
    alpha_e: float
    alpha_w: float
    final_fidelity: float
    iterations: int
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        n = len(self.times)
        for series in (
            self.battery_energy_opt,
            self.battery_ergotropy_opt,
            self.battery_energy_osc,
            self.battery_ergotropy_osc,
        ):
            if len(series) != n:
                raise ValueError("report series length does not match time grid")

    def to_dict(self) -> dict:
        return {
            "pulse_cost": self.pulse_cost,
            "baseline_cost": self.baseline_cost,
            "alpha_e_percent": self.alpha_e,
            "alpha_w_percent": self.alpha_w,
            "final_fidelity": self.final_fidelity,
            "iterations": self.iterations,
            "final_battery_energy_opt": float(self.battery_energy_opt[-1]),
            "final_battery_ergotropy_opt": float(self.battery_ergotropy_opt[-1]),
            "final_battery_energy_osc": float(self.battery_energy_osc[-1]),
            "final_battery_ergotropy_osc": float(self.battery_ergotropy_osc[-1]),
            **self.extra,
        }
