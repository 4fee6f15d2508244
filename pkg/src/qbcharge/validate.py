"""Randomized and structural oracle suites backing the physics kernels.

Each suite returns a SuiteResult; run_all executes every suite with a seeded
generator so failures are reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.linalg import expm
from scipy.stats import unitary_group

from . import energetics, gaussian, krotov, lindblad
from . import operators as ops
from .grids import PulseProfile, TimeGrid


@dataclass
class SuiteResult:
    name: str
    passed: bool
    detail: str


# ---------------------------------------------------------------------------
# Generator bookkeeping: forward minus backward equals the dissipative gap
# ---------------------------------------------------------------------------

def generator_difference_suite(corrupt: bool = False) -> SuiteResult:
    """A_f - A_b == difference matrix entry-by-entry; A_b == A_f at gamma=0.

    corrupt=True flips one backward-generator entry as a negative control.
    """
    worst = 0.0
    for gamma, n_bath, g, mu in [(0.01, 0.0, 0.2, 0.1), (0.05, 1.3, 0.37, 0.21),
                                 (0.2, 2.7, 0.11, 0.45)]:
        spec = gaussian.OscillatorSystemSpec(omega=1.0, g=g, gamma=gamma,
                                             mu=mu, n_bath=n_bath)
        af = gaussian._static_generator(spec)
        ab = gaussian._backward_static_generator(spec)
        if corrupt:
            ab = ab.copy()
            ab[1, 3] += 1e-3
        worst = max(worst, float(np.abs(af - ab - gaussian.difference_matrix(spec)).max()))
    spec0 = gaussian.OscillatorSystemSpec(omega=1.0, g=0.2, gamma=0.0, mu=0.1,
                                          n_bath=0.0)
    worst = max(worst, float(np.abs(
        gaussian._static_generator(spec0)
        - gaussian._backward_static_generator(spec0)).max()))
    return SuiteResult("generator-difference", worst < 1e-12,
                       f"max |A_f - A_b - M| = {worst:.2e}")


# ---------------------------------------------------------------------------
# Gaussian moment propagation vs. truncated Fock-space Lindblad evolution
# ---------------------------------------------------------------------------

def gaussian_vs_fock_suite(n_steps: int = 400, n_trunc: int = 30) -> SuiteResult:
    spec = gaussian.OscillatorSystemSpec(omega=1.0, g=0.2, gamma=0.01, mu=0.1,
                                         n_bath=1.0)
    grid = TimeGrid(math.pi / spec.g, n_steps)
    pulse = PulseProfile.sinusoidal(grid, amplitude=2.0, omega=spec.omega)
    psi0 = gaussian.vacuum_moments(spec.omega)
    moments = gaussian.propagate_moments(spec, pulse, psi0, grid)
    oracle = gaussian.fock_oracle(spec, pulse, grid, n_trunc=n_trunc)
    worst = max(float(np.abs(moments[k] - oracle.moments[k]).max())
                for k in range(grid.n_steps + 1))
    return SuiteResult("gaussian-vs-fock", worst < 1e-6,
                       f"max moment deviation = {worst:.2e}")


def _single_mode_fock_state(rng: np.random.Generator, n_trunc: int) -> np.ndarray:
    """Random displaced, squeezed, thermal single-mode density matrix."""
    n = np.arange(n_trunc)
    a = np.diag(np.sqrt(n[1:].astype(float)), 1)
    ad = a.conj().T
    n_th = rng.uniform(0.0, 0.4)
    p = (n_th / (1 + n_th)) ** n / (1 + n_th)
    rho = np.diag(p / p.sum())
    r = rng.uniform(-0.3, 0.3)
    squeeze = expm(0.5 * r * (a @ a) - 0.5 * r * (ad @ ad))
    rho = squeeze @ rho @ squeeze.conj().T
    alpha = rng.uniform(-0.8, 0.8) + 1j * rng.uniform(-0.8, 0.8)
    displace = expm(alpha * ad - np.conj(alpha) * a)
    rho = displace @ rho @ displace.conj().T
    return rho


def update_trace_suite(seed: int, n_pairs: int = 100,
                       n_trunc: int = 20) -> SuiteResult:
    """Closed-form field-update trace vs. the Fock commutator trace."""
    rng = np.random.default_rng(seed)
    omega, mu = 1.0, 0.1
    x1 = gaussian.fock_quadratures(n_trunc, omega)[0]
    drive = math.sqrt(2 * omega) * x1.toarray()
    worst = 0.0
    for _ in range(n_pairs):
        rho = np.kron(_single_mode_fock_state(rng, n_trunc),
                      _single_mode_fock_state(rng, n_trunc))
        sigma = np.kron(_single_mode_fock_state(rng, n_trunc),
                        _single_mode_fock_state(rng, n_trunc))
        brute = -mu * float(np.imag(np.trace(sigma @ (drive @ rho - rho @ drive))))
        closed = gaussian.moment_field_update_trace(
            gaussian.moments_from_fock(sigma, n_trunc, omega),
            gaussian.moments_from_fock(rho, n_trunc, omega), mu, omega)
        worst = max(worst, abs(closed - brute))
    return SuiteResult("update-trace", worst < 1e-6,
                       f"max |closed - Fock| over {n_pairs} pairs = {worst:.2e}")


# ---------------------------------------------------------------------------
# Field update vs. central finite differences of the functional
# ---------------------------------------------------------------------------

def _random_density_matrix(rng: np.random.Generator, dim: int) -> np.ndarray:
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = m @ m.conj().T
    return rho / np.trace(rho).real


def gradient_fd_suite(seed: int, n_trials: int = 20) -> SuiteResult:
    """field_update vs. (J(eps+h) - J(eps-h)) / 2h on random qubit problems."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_trials):
        spec = lindblad.QubitSystemSpec(
            omega=1.0, g=rng.uniform(0.1, 0.4), gamma=rng.uniform(0.0, 0.1),
            mu=rng.uniform(0.3, 0.7), n_bath=rng.uniform(0.0, 0.5))
        grid = TimeGrid(rng.uniform(0.8, 1.5), 800)
        target = _random_density_matrix(rng, spec.dim)
        rho0 = _random_density_matrix(rng, spec.dim)
        model = krotov.QubitModel(spec, grid, target=target, rho0=rho0)
        half = rng.normal(scale=0.3, size=grid.n_steps)
        values = np.concatenate([[0.0], half])
        pulse = PulseProfile(grid, values, half)
        n = int(rng.integers(5, grid.n_steps - 5))

        def j_of(shift):
            p = pulse.copy()
            p.half_values[n] += shift
            rho = krotov._replay(model, p)
            return model.terminal_cost(rho)[0]

        h = 1e-6
        fd = (j_of(h) - j_of(-h)) / (2 * h)

        # co-state after interval n and state before it, unperturbed field
        sigma = model.costate_boundary()
        for i in range(grid.n_steps - 1, n, -1):
            sigma = model.backstep(sigma, half[i], grid.dt)
        rho = model.initial_state()
        for i in range(n):
            rho = model.step(rho, half[i], grid.dt)
        update = krotov.field_update(sigma, rho, 1.0, 1.0, model)
        predicted = -grid.dt * update
        rel = abs(predicted - fd) / max(abs(fd), 1e-3)
        worst = max(worst, rel)
    return SuiteResult("gradient-fd", worst < 0.02,
                       f"max relative error over {n_trials} trials = {worst:.2e}")


# ---------------------------------------------------------------------------
# Sorted-spectrum ergotropy vs. brute-force unitary work extraction
# ---------------------------------------------------------------------------

def ergotropy_brute_force_suite(seed: int, n_states: int = 50,
                                n_unitaries: int = 10_000) -> SuiteResult:
    rng = np.random.default_rng(seed)
    dim = 4
    ham = np.diag(np.sort(rng.uniform(0.0, 2.0, size=dim)))
    unitaries = unitary_group.rvs(dim, size=n_unitaries,
                                  random_state=np.random.RandomState(seed))
    worst = -np.inf
    for _ in range(n_states):
        rho = _random_density_matrix(rng, dim)
        erg = energetics.ergotropy(rho, ham)
        e0 = energetics.energy(rho, ham)
        # W_U = E(rho) - E(U rho U^dagger), batched over all unitaries
        rotated = np.einsum("uij,jk,ulk->uil", unitaries, rho,
                            unitaries.conj(), optimize=True)
        extracted = e0 - np.real(np.einsum("uii->u", rotated @ ham))
        worst = max(worst, float(extracted.max() - erg))
    return SuiteResult("ergotropy-brute-force", worst < 1e-9,
                       f"max (brute - sorted) = {worst:.2e}")


# ---------------------------------------------------------------------------
# Adjoint-dissipator duality and thermal stationarity
# ---------------------------------------------------------------------------

def duality_suite(seed: int) -> SuiteResult:
    rng = np.random.default_rng(seed)
    spec = lindblad.QubitSystemSpec(omega=1.0, g=0.3, gamma=0.08, mu=0.4,
                                    n_bath=0.7)
    worst = 0.0
    for _ in range(20):
        a = _random_density_matrix(rng, spec.dim)
        b = rng.normal(size=(spec.dim,) * 2) + 1j * rng.normal(size=(spec.dim,) * 2)
        b = b + b.conj().T
        lhs = np.trace(b @ lindblad.dissipator(spec, a)).real
        rhs = np.trace(lindblad.adjoint_dissipator(spec, b) @ a).real
        worst = max(worst, abs(lhs - rhs))

    # the uncoupled charger thermalizes to the bath's Gibbs state
    g0 = lindblad.QubitSystemSpec(omega=1.0, g=0.0, gamma=0.08, mu=0.4, n_bath=0.7)
    n = g0.n_bath
    p_up = n / (2 * n + 1)
    gibbs_ch = np.diag([1 - p_up, p_up])
    gibbs = ops.tensor([gibbs_ch, np.diag([1.0, 0.0])])
    l0, _ = lindblad.liouvillian_parts(g0)
    resid = float(np.abs(l0 @ gibbs.reshape(-1)).max())
    worst = max(worst, resid)
    return SuiteResult("dissipator-duality", worst < 1e-12,
                       f"max duality/stationarity residual = {worst:.2e}")


def run_all(seed: int = 1234) -> list[SuiteResult]:
    return [
        generator_difference_suite(),
        duality_suite(seed),
        ergotropy_brute_force_suite(seed),
        gradient_fd_suite(seed),
        update_trace_suite(seed),
        gaussian_vs_fock_suite(),
    ]
