"""Exact two-mode Gaussian dynamics for the oscillator charger/battery model.

The state is a 15-component moment vector: a linearization constant c (kept
at 1), the four first moments <x1>,<x2>,<p1>,<p2>, and the ten upper
triangular entries of the symmetric second-moment matrix V.  Forward and
backward evolutions are linear ODEs psi' = A psi whose generators are built
entry by entry; a truncated two-mode Fock-space Lindblad solver serves as an
independent oracle for validating the moment machinery.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from ._rk4 import propagate_bilinear
from .grids import PulseProfile, TimeGrid
from .operators import ladder

N_MOMENTS = 15
C = 0
X1, X2, P1, P2 = 1, 2, 3, 4
# Upper-triangular second moments, ordered V11,V12,V13,V14,V22,V23,V24,V33,V34,V44
# with quadrature labels (1,2,3,4) = (x1,x2,p1,p2).
_V_INDEX = {
    (1, 1): 5, (1, 2): 6, (1, 3): 7, (1, 4): 8,
    (2, 2): 9, (2, 3): 10, (2, 4): 11,
    (3, 3): 12, (3, 4): 13, (4, 4): 14,
}


class TruncationError(RuntimeError):
    """Fock-space truncation too small for the propagated state."""


@dataclass(frozen=True)
class OscillatorSystemSpec:
    """Physical parameters of the oscillator charger/battery model."""

    omega: float = 1.0
    g: float = 0.2
    gamma: float = 0.01
    mu: float = 0.1
    n_bath: float = 0.0

    def __post_init__(self):
        if min(self.omega, self.g, self.gamma, self.mu) < 0 or self.n_bath < 0:
            raise ValueError("rates and couplings must be non-negative")


def _static_generator(spec: OscillatorSystemSpec) -> np.ndarray:
    """Field-free part of the forward generator."""
    w, g, gam, n = spec.omega, spec.g, spec.gamma, spec.n_bath
    gw = g / w
    V = _V_INDEX
    a = np.zeros((N_MOMENTS, N_MOMENTS))
    a[X1, X1] = -gam / 2; a[X1, P1] = 1.0; a[X1, P2] = gw
    a[X2, P1] = gw; a[X2, P2] = 1.0
    a[P1, X1] = -w**2; a[P1, X2] = -g * w; a[P1, P1] = -gam / 2
    a[P2, X1] = -g * w; a[P2, X2] = -w**2
    a[V[1, 1], C] = gam * (n + 0.5) / w
    a[V[1, 1], V[1, 1]] = -gam; a[V[1, 1], V[1, 3]] = 2.0; a[V[1, 1], V[1, 4]] = 2 * gw
    a[V[1, 2], V[1, 2]] = -gam / 2; a[V[1, 2], V[1, 3]] = gw; a[V[1, 2], V[1, 4]] = 1.0
    a[V[1, 2], V[2, 3]] = 1.0; a[V[1, 2], V[2, 4]] = gw
    a[V[1, 3], V[1, 1]] = -w**2; a[V[1, 3], V[1, 2]] = -g * w; a[V[1, 3], V[1, 3]] = -gam
    a[V[1, 3], V[3, 3]] = 1.0; a[V[1, 3], V[3, 4]] = gw
    a[V[1, 4], V[1, 1]] = -g * w; a[V[1, 4], V[1, 2]] = -w**2; a[V[1, 4], V[1, 4]] = -gam / 2
    a[V[1, 4], V[3, 4]] = 1.0; a[V[1, 4], V[4, 4]] = gw
    a[V[2, 2], V[2, 3]] = 2 * gw; a[V[2, 2], V[2, 4]] = 2.0
    a[V[2, 3], V[1, 2]] = -w**2; a[V[2, 3], V[2, 2]] = -g * w; a[V[2, 3], V[2, 3]] = -gam / 2
    a[V[2, 3], V[3, 3]] = gw; a[V[2, 3], V[3, 4]] = 1.0
    a[V[2, 4], V[1, 2]] = -g * w; a[V[2, 4], V[2, 2]] = -w**2
    a[V[2, 4], V[3, 4]] = gw; a[V[2, 4], V[4, 4]] = 1.0
    a[V[3, 3], C] = gam * w * (n + 0.5)
    a[V[3, 3], V[1, 3]] = -2 * w**2; a[V[3, 3], V[2, 3]] = -2 * g * w; a[V[3, 3], V[3, 3]] = -gam
    a[V[3, 4], V[1, 3]] = -g * w; a[V[3, 4], V[1, 4]] = -w**2
    a[V[3, 4], V[2, 3]] = -w**2; a[V[3, 4], V[2, 4]] = -g * w; a[V[3, 4], V[3, 4]] = -gam / 2
    a[V[4, 4], V[1, 4]] = -2 * g * w; a[V[4, 4], V[2, 4]] = -2 * w**2
    return a


def generator_drive_part(spec: OscillatorSystemSpec) -> np.ndarray:
    """d(A)/d(eps): the drive enters linearly and identically in both directions."""
    e = math.sqrt(2 * spec.omega) * spec.mu
    V = _V_INDEX
    a = np.zeros((N_MOMENTS, N_MOMENTS))
    a[P1, C] = e
    a[V[1, 3], X1] = e
    a[V[2, 3], X2] = e
    a[V[3, 3], P1] = 2 * e
    a[V[3, 4], P2] = e
    return a


def difference_matrix(spec: OscillatorSystemSpec) -> np.ndarray:
    """M = A_f - A_b: a gamma shift on the diagonal plus two constant-column terms."""
    w, gam, n = spec.omega, spec.gamma, spec.n_bath
    m = gam * np.eye(N_MOMENTS)
    m[C, C] = 0.0
    m[_V_INDEX[1, 1], C] = 2 * gam * (n + 0.5) / w
    m[_V_INDEX[3, 3], C] = 2 * gam * w * (n + 0.5)
    return m


def _backward_static_generator(spec: OscillatorSystemSpec) -> np.ndarray:
    """Field-free part of the backward (co-state) generator, transcribed directly."""
    w, g, gam, n = spec.omega, spec.g, spec.gamma, spec.n_bath
    gw = g / w
    V = _V_INDEX
    a = np.zeros((N_MOMENTS, N_MOMENTS))
    a[X1, X1] = -3 * gam / 2; a[X1, P1] = 1.0; a[X1, P2] = gw
    a[X2, X2] = -gam; a[X2, P1] = gw; a[X2, P2] = 1.0
    a[P1, X1] = -w**2; a[P1, X2] = -g * w; a[P1, P1] = -3 * gam / 2
    a[P2, X1] = -g * w; a[P2, X2] = -w**2; a[P2, P2] = -gam
    a[V[1, 1], C] = -gam * (n + 0.5) / w
    a[V[1, 1], V[1, 1]] = -2 * gam; a[V[1, 1], V[1, 3]] = 2.0; a[V[1, 1], V[1, 4]] = 2 * gw
    a[V[1, 2], V[1, 2]] = -3 * gam / 2; a[V[1, 2], V[1, 3]] = gw; a[V[1, 2], V[1, 4]] = 1.0
    a[V[1, 2], V[2, 3]] = 1.0; a[V[1, 2], V[2, 4]] = gw
    a[V[1, 3], V[1, 1]] = -w**2; a[V[1, 3], V[1, 2]] = -g * w; a[V[1, 3], V[1, 3]] = -2 * gam
    a[V[1, 3], V[3, 3]] = 1.0; a[V[1, 3], V[3, 4]] = gw
    a[V[1, 4], V[1, 1]] = -g * w; a[V[1, 4], V[1, 2]] = -w**2; a[V[1, 4], V[1, 4]] = -3 * gam / 2
    a[V[1, 4], V[3, 4]] = 1.0; a[V[1, 4], V[4, 4]] = gw
    a[V[2, 2], V[2, 2]] = -gam; a[V[2, 2], V[2, 3]] = 2 * gw; a[V[2, 2], V[2, 4]] = 2.0
    a[V[2, 3], V[1, 2]] = -w**2; a[V[2, 3], V[2, 2]] = -g * w; a[V[2, 3], V[2, 3]] = -3 * gam / 2
    a[V[2, 3], V[3, 3]] = gw; a[V[2, 3], V[3, 4]] = 1.0
    a[V[2, 4], V[1, 2]] = -g * w; a[V[2, 4], V[2, 2]] = -w**2; a[V[2, 4], V[2, 4]] = -gam
    a[V[2, 4], V[3, 4]] = gw; a[V[2, 4], V[4, 4]] = 1.0
    a[V[3, 3], C] = -gam * w * (n + 0.5)
    a[V[3, 3], V[1, 3]] = -2 * w**2; a[V[3, 3], V[2, 3]] = -2 * g * w; a[V[3, 3], V[3, 3]] = -2 * gam
    a[V[3, 4], V[1, 3]] = -g * w; a[V[3, 4], V[1, 4]] = -w**2
    a[V[3, 4], V[2, 3]] = -w**2; a[V[3, 4], V[2, 4]] = -g * w; a[V[3, 4], V[3, 4]] = -3 * gam / 2
    a[V[4, 4], V[1, 4]] = -2 * g * w; a[V[4, 4], V[2, 4]] = -2 * w**2; a[V[4, 4], V[4, 4]] = -gam
    return a


def build_forward_generator(spec: OscillatorSystemSpec, eps: float) -> np.ndarray:
    return _static_generator(spec) + eps * generator_drive_part(spec)


def build_backward_generator(spec: OscillatorSystemSpec, eps: float) -> np.ndarray:
    return _backward_static_generator(spec) + eps * generator_drive_part(spec)


def propagate_moments(spec: OscillatorSystemSpec, pulse: PulseProfile, psi0: np.ndarray,
                      grid: TimeGrid, direction: str = "forward") -> list[np.ndarray]:
    """Moment-vector trajectory, one vector per grid point.

    direction="backward" integrates the co-state generator from t=tau down
    to t=0; the returned list is still indexed by grid point.
    """
    if pulse.grid != grid:
        raise ValueError("pulse is not defined on the supplied grid")
    a1 = generator_drive_part(spec)
    if direction == "forward":
        return propagate_bilinear(_static_generator(spec), a1,
                                  pulse.values, pulse.half_values, psi0, grid.dt)
    if direction == "backward":
        # In reversed time s = tau - t the co-state obeys dchi/ds = -A_b chi.
        a0 = -_backward_static_generator(spec)
        out = propagate_bilinear(a0, -a1, pulse.values[::-1], pulse.half_values[::-1],
                                 psi0, grid.dt)
        return out[::-1]
    raise ValueError(f"unknown direction {direction!r}")


# ---------------------------------------------------------------------------
# Moment-vector constructors and observables
# ---------------------------------------------------------------------------

def moment_vector(r: np.ndarray, vc: np.ndarray) -> np.ndarray:
    """Assemble psi from first moments and a covariance matrix (V = Vc + r r^T)."""
    r = np.asarray(r, dtype=float)
    v = np.asarray(vc, dtype=float) + np.outer(r, r)
    psi = np.empty(N_MOMENTS)
    psi[C] = 1.0
    psi[X1:P2 + 1] = r
    for (i, j), k in _V_INDEX.items():
        psi[k] = v[i - 1, j - 1]
    return psi


def vacuum_covariance(omega: float = 1.0) -> np.ndarray:
    return np.diag([0.5 / omega, 0.5 / omega, 0.5 * omega, 0.5 * omega])


def vacuum_moments(omega: float = 1.0) -> np.ndarray:
    return moment_vector(np.zeros(4), vacuum_covariance(omega))


def coherent_first_moments(alpha1: complex, alpha2: complex, omega: float = 1.0) -> np.ndarray:
    s_x = math.sqrt(2.0 / omega)
    s_p = math.sqrt(2.0 * omega)
    return np.array([s_x * alpha1.real, s_x * alpha2.real,
                     s_p * alpha1.imag, s_p * alpha2.imag])


def coherent_moments(alpha1: complex, alpha2: complex, omega: float = 1.0) -> np.ndarray:
    """Moment vector of the pure product coherent state |alpha1>|alpha2>."""
    return moment_vector(coherent_first_moments(alpha1, alpha2, omega),
                         vacuum_covariance(omega))


def first_moments(psi: np.ndarray) -> np.ndarray:
    return np.asarray(psi)[X1:P2 + 1]


def second_moment_matrix(psi: np.ndarray) -> np.ndarray:
    v = np.empty((4, 4))
    for (i, j), k in _V_INDEX.items():
        v[i - 1, j - 1] = v[j - 1, i - 1] = psi[k]
    return v


def covariance_matrix(psi: np.ndarray) -> np.ndarray:
    r = first_moments(psi)
    return second_moment_matrix(psi) - np.outer(r, r)


def symplectic_form() -> np.ndarray:
    j = np.zeros((4, 4))
    j[:2, 2:] = np.eye(2)
    j[2:, :2] = -np.eye(2)
    return j


def uncertainty_defect(psi: np.ndarray) -> float:
    """Smallest eigenvalue of Vc + iJ/2; physical states give >= -tolerance."""
    m = covariance_matrix(psi).astype(complex) + 0.5j * symplectic_form()
    return float(np.linalg.eigvalsh(m)[0])


def battery_energy(psi: np.ndarray, omega: float = 1.0) -> float:
    """E_B = omega <b^dag b> from the raw second moments, in units of omega."""
    e = 0.5 * (omega**2 * psi[_V_INDEX[2, 2]] + psi[_V_INDEX[4, 4]]) - 0.5 * omega
    if e < -1e-8:
        raise ValueError(f"negative battery energy {e}: unphysical moment vector")
    return max(e, 0.0)


def charger_energy(psi: np.ndarray, omega: float = 1.0) -> float:
    e = 0.5 * (omega**2 * psi[_V_INDEX[1, 1]] + psi[_V_INDEX[3, 3]]) - 0.5 * omega
    return max(e, 0.0)


def battery_covariance(psi: np.ndarray) -> np.ndarray:
    vc = covariance_matrix(psi)
    idx = np.ix_([1, 3], [1, 3])  # (x2, p2) block
    return vc[idx]


def gaussian_ergotropy(psi: np.ndarray, omega: float = 1.0) -> float:
    """Battery-mode ergotropy: energy above the thermal state with the same
    symplectic eigenvalue (the Gaussian passive state)."""
    det = float(np.linalg.det(battery_covariance(psi)))
    if det < 0.25 - 1e-8:
        raise ValueError(f"unphysical battery covariance: det={det} < 1/4")
    nu = 2.0 * math.sqrt(max(det, 0.25))
    return max(battery_energy(psi, omega) - 0.5 * omega * (nu - 1.0), 0.0)


def gaussian_overlap(chi: np.ndarray, psi: np.ndarray) -> float:
    """tr(sigma rho) for the Gaussian states described by the two moment vectors."""
    sigma_cov = covariance_matrix(chi) + covariance_matrix(psi)
    d = first_moments(chi) - first_moments(psi)
    det = float(np.linalg.det(sigma_cov))
    if det <= 0:
        raise ValueError("covariance sum is not positive definite")
    u = np.linalg.solve(sigma_cov, d)
    return float(chi[C] * psi[C] * math.exp(-0.5 * d @ u) / math.sqrt(det))


def moment_field_update_trace(chi: np.ndarray, psi: np.ndarray, mu: float,
                              omega: float = 1.0) -> float:
    """-mu Im tr(sigma [a1 + a1^dag, rho]) from the moments of the two states.

    Closed form from the Gaussian overlap: with Sigma = Vc_sigma + Vc_rho and
    d = r_sigma - r_rho, the value is
    mu sqrt(2 omega) tr(sigma rho) [Sigma^{-1} d]_{p1}.
    """
    if mu == 0.0:
        return 0.0
    sigma_cov = covariance_matrix(chi) + covariance_matrix(psi)
    d = first_moments(chi) - first_moments(psi)
    det = float(np.linalg.det(sigma_cov))
    if det <= 0:
        raise ValueError("covariance sum is not positive definite")
    u = np.linalg.solve(sigma_cov, d)
    overlap = chi[C] * psi[C] * math.exp(-0.5 * d @ u) / math.sqrt(det)
    return float(mu * math.sqrt(2.0 * omega) * overlap * u[2])


# ---------------------------------------------------------------------------
# Fock-truncated Lindblad oracle
# ---------------------------------------------------------------------------

def _mode_ops(n_trunc: int):
    a = sp.csr_matrix(ladder(n_trunc, "annihilate"))
    eye = sp.identity(n_trunc, dtype=complex, format="csr")
    a1 = sp.kron(a, eye, format="csr")
    a2 = sp.kron(eye, a, format="csr")
    return a1, a2


def fock_quadratures(n_trunc: int, omega: float = 1.0):
    """Sparse (x1, x2, p1, p2) quadratures in the truncated two-mode basis."""
    a1, a2 = _mode_ops(n_trunc)
    sx = math.sqrt(0.5 / omega)
    sp_ = 1j * math.sqrt(0.5 * omega)
    return (sx * (a1 + a1.conj().T), sx * (a2 + a2.conj().T),
            sp_ * (a1.conj().T - a1), sp_ * (a2.conj().T - a2))


def fock_hamiltonian(spec: OscillatorSystemSpec, n_trunc: int, eps: float = 0.0):
    a1, a2 = _mode_ops(n_trunc)
    h = (spec.omega * (a1.conj().T @ a1 + a2.conj().T @ a2)
         + spec.g * (a1 @ a2.conj().T + a1.conj().T @ a2))
    if eps:
        h = h - spec.mu * eps * (a1 + a1.conj().T)
    return h


def fock_liouvillian_parts(spec: OscillatorSystemSpec, n_trunc: int):
    """Sparse (L0, L1) with L(eps) = L0 + eps L1 on row-major vec(rho)."""
    dim = n_trunc * n_trunc
    eye = sp.identity(dim, dtype=complex, format="csr")
    h0 = fock_hamiltonian(spec, n_trunc)
    l0 = -1j * (sp.kron(h0, eye) - sp.kron(eye, h0.T))
    a1, _ = _mode_ops(n_trunc)
    for rate, c in ((spec.gamma * (spec.n_bath + 1.0), a1),
                    (spec.gamma * spec.n_bath, a1.conj().T.tocsr())):
        if rate == 0.0:
            continue
        cdc = (c.conj().T @ c).tocsr()
        l0 = l0 + rate * (sp.kron(c, c.conj())
                          - 0.5 * (sp.kron(cdc, eye) + sp.kron(eye, cdc.T)))
    x = a1 + a1.conj().T
    l1 = 1j * spec.mu * (sp.kron(x, eye) - sp.kron(eye, x.T))
    return l0.tocsr(), l1.tocsr()


def sparse_trace(rho: np.ndarray, op) -> complex:
    """tr(rho op) for dense rho and sparse op."""
    op = sp.coo_matrix(op)
    return complex(np.sum(op.data * rho[op.col, op.row]))


def moments_from_fock(rho: np.ndarray, n_trunc: int, omega: float = 1.0) -> np.ndarray:
    """Measure the 15-component moment vector of a Fock-basis density matrix."""
    if sp.issparse(rho):
        rho = rho.toarray()
    quads = fock_quadratures(n_trunc, omega)
    psi = np.empty(N_MOMENTS)
    psi[C] = float(np.real(np.trace(rho)))
    for i, q in enumerate(quads):
        psi[X1 + i] = float(sparse_trace(rho, q).real)
    for (i, j), k in _V_INDEX.items():
        prod = 0.5 * (quads[i - 1] @ quads[j - 1] + quads[j - 1] @ quads[i - 1])
        psi[k] = float(sparse_trace(rho, prod).real)
    return psi


def _check_leakage(rho: np.ndarray, n_trunc: int, tol: float = 1e-8) -> None:
    pops = np.real(np.diag(rho)).reshape(n_trunc, n_trunc)
    leak = float(pops[-2:, :].sum() + pops[:, -2:].sum())
    if leak > tol:
        raise TruncationError(
            f"truncation too small: edge-level population {leak:.3e} exceeds {tol:.0e}")


@dataclass
class FockTrajectory:
    """Oracle output: moment vectors everywhere, density matrices on request."""

    grid: TimeGrid
    n_trunc: int
    moments: list[np.ndarray]
    states: list[np.ndarray] | None

    @property
    def final_state(self) -> np.ndarray:
        if self.states is None:
            raise ValueError("states were not stored for this run")
        return self.states[-1]


def fock_oracle(spec: OscillatorSystemSpec, pulse: PulseProfile, grid: TimeGrid,
                n_trunc: int, keep_states: bool = False,
                rho0: np.ndarray | None = None) -> FockTrajectory:
    """Reference Lindblad trajectory in a truncated two-mode Fock basis.

    Raises TruncationError if the top two Fock levels of either mode acquire
    population above 1e-8 at any grid point.
    """
    if n_trunc < 4:
        raise ValueError("n_trunc must be >= 4")
    from ._rk4 import step_bilinear

    dim = n_trunc * n_trunc
    if rho0 is None:
        rho0 = np.zeros((dim, dim), dtype=complex)
        rho0[0, 0] = 1.0
    l0, l1 = fock_liouvillian_parts(spec, n_trunc)
    v = rho0.reshape(-1)
    moments = [moments_from_fock(rho0, n_trunc, spec.omega)]
    states = [rho0.copy()] if keep_states else None
    _check_leakage(rho0, n_trunc)
    for n in range(grid.n_steps):
        v = step_bilinear(l0, l1, v, pulse.values[n], pulse.half_values[n],
                          pulse.values[n + 1], grid.dt)
        rho = v.reshape(dim, dim)
        _check_leakage(rho, n_trunc)
        moments.append(moments_from_fock(rho, n_trunc, spec.omega))
        if keep_states:
            states.append(rho.copy())
    return FockTrajectory(grid, n_trunc, moments, states)


def coherent_fock_state(alpha: complex, n_trunc: int) -> np.ndarray:
    ns = np.arange(n_trunc)
    log_fact = np.cumsum(np.log(np.maximum(ns, 1)))
    amps = np.exp(-0.5 * abs(alpha) ** 2 + ns * np.log(complex(alpha) if alpha != 0 else 1.0)
                  - 0.5 * log_fact) if alpha != 0 else None
    if alpha == 0:
        vec = np.zeros(n_trunc, dtype=complex)
        vec[0] = 1.0
        return vec
    return amps.astype(complex)
