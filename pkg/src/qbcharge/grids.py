"""Uniform time grids and pulses sampled on them (grid and half-grid points)."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class TimeGrid:
    """N+1 uniformly spaced points from t=0 to t=tau."""

    tau: float
    n_steps: int

    def __post_init__(self):
        if self.tau <= 0:
            raise ValueError("tau must be positive")
        if self.n_steps < 2:
            raise ValueError("n_steps must be >= 2")

    @property
    def dt(self) -> float:
        return self.tau / self.n_steps

    @property
    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.tau, self.n_steps + 1)

    @property
    def half_times(self) -> np.ndarray:
        return self.times[:-1] + 0.5 * self.dt


@dataclass
class PulseProfile:
    """Real drive amplitude sampled at grid points and at half-grid points."""

    grid: TimeGrid
    values: np.ndarray
    half_values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        self.half_values = np.asarray(self.half_values, dtype=float)
        if self.values.shape != (self.grid.n_steps + 1,):
            raise ValueError("pulse values length does not match grid")
        if self.half_values.shape != (self.grid.n_steps,):
            raise ValueError("pulse half_values length does not match grid")
        if not (np.all(np.isfinite(self.values)) and np.all(np.isfinite(self.half_values))):
            raise ValueError("pulse contains non-finite values")

    @classmethod
    def from_callable(cls, grid: TimeGrid, fn) -> "PulseProfile":
        return cls(grid, np.array([fn(t) for t in grid.times]),
                   np.array([fn(t) for t in grid.half_times]))

    @classmethod
    def zero(cls, grid: TimeGrid) -> "PulseProfile":
        return cls(grid, np.zeros(grid.n_steps + 1), np.zeros(grid.n_steps))

    @classmethod
    def sinusoidal(cls, grid: TimeGrid, amplitude: float = 2.0, omega: float = 1.0) -> "PulseProfile":
        """The eps(t) = amplitude * cos(omega t) baseline drive."""
        return cls.from_callable(grid, lambda t: amplitude * np.cos(omega * t))

    def copy(self) -> "PulseProfile":
        return PulseProfile(self.grid, self.values.copy(), self.half_values.copy())
