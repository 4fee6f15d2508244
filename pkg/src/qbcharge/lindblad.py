"""GKSL dynamics of a driven qubit charger coupled to an N-cell qubit battery.

Forward propagation integrates drho/dt = -i[H, rho] + D[rho]; backward
propagation integrates the co-state equation dsigma/dt = -L^dag sigma from
t=tau down to t=0.  Both use fixed-step RK4 on the vectorized master
equation, with the drive held at its half-grid value for the mid stages.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import operators as ops
from ._rk4 import propagate_bilinear, propagate_timed
from .grids import PulseProfile, TimeGrid


@dataclass(frozen=True)
class QubitSystemSpec:
    """Physical parameters of the qubit charger/battery model (units of omega)."""

    omega: float = 1.0
    g: float = 0.2
    gamma: float = 0.05
    mu: float = 0.5
    n_bath: float = 0.0
    cells: int = 1

    def __post_init__(self):
        if min(self.omega, self.g, self.gamma, self.mu) < 0 or self.n_bath < 0:
            raise ValueError("rates and couplings must be non-negative")
        if self.cells < 1:
            raise ValueError("cells must be >= 1")

    @property
    def dim(self) -> int:
        return 2 ** (self.cells + 1)


def charger_op(op2: np.ndarray, cells: int) -> np.ndarray:
    return ops.tensor([op2] + [ops.identity(2)] * cells)


def cell_op(op2: np.ndarray, k: int, cells: int) -> np.ndarray:
    factors = [ops.identity(2)] * (cells + 1)
    factors[1 + k] = op2
    return ops.tensor(factors)


def static_hamiltonian(spec: QubitSystemSpec) -> np.ndarray:
    """H_A + H_B + H_AB without the drive."""
    w, g, cells = spec.omega, spec.g, spec.cells
    ground_shift = 0.5 * w * (-ops.pauli("z") + ops.identity(2))
    h = charger_op(ground_shift, cells)
    sp, sm = ops.pauli("plus"), ops.pauli("minus")
    for k in range(cells):
        h = h + cell_op(ground_shift, k, cells)
        h = h + g * (charger_op(sp, cells) @ cell_op(sm, k, cells)
                     + charger_op(sm, cells) @ cell_op(sp, k, cells))
    return h


def drive_operator(spec: QubitSystemSpec) -> np.ndarray:
    """sigma_x on the charger; the drive couples as -mu eps(t) sigma_A^x."""
    return charger_op(ops.pauli("x"), spec.cells)


def build_drive_hamiltonian(spec: QubitSystemSpec, eps: float) -> np.ndarray:
    return static_hamiltonian(spec) - spec.mu * eps * drive_operator(spec)


def build_oscillatory_hamiltonian(spec: QubitSystemSpec, t: float, f_amp: float) -> np.ndarray:
    """Baseline RWA drive F(e^{-iwt} sigma_A^+ + e^{iwt} sigma_A^-)."""
    if f_amp < 0:
        raise ValueError("drive amplitude must be non-negative")
    sp = charger_op(ops.pauli("plus"), spec.cells)
    phase = np.exp(-1j * spec.omega * t)
    drive = f_amp * (phase * sp + np.conj(phase) * sp.conj().T)
    return static_hamiltonian(spec) + drive


def collapse_operators(spec: QubitSystemSpec) -> list[tuple[float, np.ndarray]]:
    """(rate, operator) pairs of the thermal dissipator acting on the charger."""
    sm = charger_op(ops.pauli("minus"), spec.cells)
    return [
        (spec.gamma * (spec.n_bath + 1.0), sm),
        (spec.gamma * spec.n_bath, sm.conj().T),
    ]


def dissipator(spec: QubitSystemSpec, rho: np.ndarray) -> np.ndarray:
    if rho.shape != (spec.dim, spec.dim):
        raise ValueError(f"dimension mismatch: rho {rho.shape}, expected {spec.dim}")
    out = np.zeros_like(rho, dtype=complex)
    for rate, c in collapse_operators(spec):
        cdc = c.conj().T @ c
        out += rate * (c @ rho @ c.conj().T - 0.5 * (cdc @ rho + rho @ cdc))
    return out


def adjoint_dissipator(spec: QubitSystemSpec, x: np.ndarray) -> np.ndarray:
    """Heisenberg-picture dissipator, dual to `dissipator` under the trace."""
    if x.shape != (spec.dim, spec.dim):
        raise ValueError(f"dimension mismatch: X {x.shape}, expected {spec.dim}")
    out = np.zeros_like(x, dtype=complex)
    for rate, c in collapse_operators(spec):
        cdc = c.conj().T @ c
        out += rate * (c.conj().T @ x @ c - 0.5 * (cdc @ x + x @ cdc))
    return out


def _hamiltonian_superop(h: np.ndarray) -> np.ndarray:
    dim = h.shape[0]
    eye = np.eye(dim)
    return -1j * (np.kron(h, eye) - np.kron(eye, h.T))


@lru_cache(maxsize=16)
def liouvillian_parts(spec: QubitSystemSpec) -> tuple[np.ndarray, np.ndarray]:
    """(L0, L1) with L(eps) = L0 + eps L1 acting on row-major vec(rho)."""
    dim = spec.dim
    eye = np.eye(dim)
    l0 = _hamiltonian_superop(static_hamiltonian(spec))
    for rate, c in collapse_operators(spec):
        cdc = c.conj().T @ c
        l0 += rate * (np.kron(c, c.conj())
                      - 0.5 * (np.kron(cdc, eye) + np.kron(eye, cdc.T)))
    x = drive_operator(spec)
    l1 = 1j * spec.mu * (np.kron(x, eye) - np.kron(eye, x.T))
    return l0, l1


def propagate_forward(spec: QubitSystemSpec, pulse: PulseProfile, rho0: np.ndarray,
                      grid: TimeGrid) -> list[np.ndarray]:
    """Forward trajectory, one density matrix per grid point."""
    if pulse.grid != grid:
        raise ValueError("pulse is not defined on the supplied grid")
    l0, l1 = liouvillian_parts(spec)
    vecs = propagate_bilinear(l0, l1, pulse.values, pulse.half_values,
                              rho0.reshape(-1), grid.dt)
    return [v.reshape(spec.dim, spec.dim) for v in vecs]


def propagate_backward(spec: QubitSystemSpec, pulse: PulseProfile, sigma_tau: np.ndarray,
                       grid: TimeGrid) -> list[np.ndarray]:
    """Co-state trajectory of dsigma/dt = -L^dag sigma, indexed by grid point."""
    if pulse.grid != grid:
        raise ValueError("pulse is not defined on the supplied grid")
    l0, l1 = liouvillian_parts(spec)
    # In reversed time s = tau - t the co-state obeys dv/ds = L^dag v.
    vecs = propagate_bilinear(l0.conj().T, l1.conj().T,
                              pulse.values[::-1], pulse.half_values[::-1],
                              sigma_tau.reshape(-1), grid.dt)
    return [v.reshape(spec.dim, spec.dim) for v in vecs[::-1]]


def propagate_oscillatory(spec: QubitSystemSpec, f_amp: float, rho0: np.ndarray,
                          grid: TimeGrid) -> list[np.ndarray]:
    """Forward trajectory under the RWA oscillatory baseline drive."""
    l0, _ = liouvillian_parts(spec)
    sp = charger_op(ops.pauli("plus"), spec.cells)
    lx = _hamiltonian_superop(sp + sp.conj().T)
    ly = _hamiltonian_superop(1j * (sp.conj().T - sp))
    w = spec.omega

    def apply(t, v):
        return l0 @ v + (f_amp * np.cos(w * t)) * (lx @ v) + (f_amp * np.sin(w * t)) * (ly @ v)

    vecs = propagate_timed(apply, grid.times, rho0.reshape(-1))
    return [v.reshape(spec.dim, spec.dim) for v in vecs]


def ground_state(spec: QubitSystemSpec) -> np.ndarray:
    """|0...0><0...0| of the charger+battery register."""
    return ops.projector(ops.basis_state(spec.dim, 0))


def charged_battery_target(spec: QubitSystemSpec) -> np.ndarray:
    """I_A otimes |1...1><1...1|_B, the maximally excited battery projector."""
    battery = ops.projector(ops.basis_state(2 ** spec.cells, 2 ** spec.cells - 1))
    return np.kron(ops.identity(2), battery)


def battery_hamiltonian(spec: QubitSystemSpec) -> np.ndarray:
    """Free battery Hamiltonian on the battery factor alone (dim 2^cells)."""
    ground_shift = 0.5 * spec.omega * (-ops.pauli("z") + ops.identity(2))
    h = np.zeros((2 ** spec.cells,) * 2, dtype=complex)
    for k in range(cells := spec.cells):
        factors = [ops.identity(2)] * cells
        factors[k] = ground_shift
        h += ops.tensor(factors)
    return h


def reduced_battery_state(spec: QubitSystemSpec, rho: np.ndarray) -> np.ndarray:
    dims = (2,) * (spec.cells + 1)
    return ops.partial_trace(rho, dims, tuple(range(1, spec.cells + 1)))
