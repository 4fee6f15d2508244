import numpy as np
import pytest

from qbcharge import lindblad
from qbcharge import operators as ops
from qbcharge.grids import PulseProfile, TimeGrid


def make_spec(**kwargs):
    defaults = dict(omega=1.0, g=0.2, gamma=0.05, mu=0.5, n_bath=0.0, cells=1)
    defaults.update(kwargs)
    return lindblad.QubitSystemSpec(**defaults)


def excited_charger_ground_battery():
    return ops.tensor([np.diag([0.0, 1.0]), np.diag([1.0, 0.0])]).astype(complex)


def test_spec_validation():
    with pytest.raises(ValueError):
        make_spec(gamma=-0.1)
    with pytest.raises(ValueError):
        make_spec(n_bath=-0.5)
    with pytest.raises(ValueError):
        make_spec(cells=0)


def test_dimension_scales_with_cells():
    assert make_spec().dim == 4
    assert make_spec(cells=3).dim == 16


def test_static_hamiltonian_ground_energy():
    spec = make_spec()
    rho = lindblad.ground_state(spec)
    assert ops.expectation(rho, lindblad.static_hamiltonian(spec)) == pytest.approx(0.0)


def test_static_hamiltonian_doubly_excited_energy():
    spec = make_spec()
    rho = ops.tensor([np.diag([0.0, 1.0]), np.diag([0.0, 1.0])]).astype(complex)
    h = lindblad.static_hamiltonian(spec)
    assert ops.expectation(rho, h).real == pytest.approx(2.0 * spec.omega)


def test_drive_hamiltonian_hermitian():
    spec = make_spec()
    rng = np.random.default_rng(1)
    for eps in rng.normal(size=5):
        h = lindblad.build_drive_hamiltonian(spec, eps)
        assert np.abs(h - h.conj().T).max() < 1e-14


def test_oscillatory_hamiltonian_at_t0():
    spec = make_spec()
    f_amp = 0.3
    h = lindblad.build_oscillatory_hamiltonian(spec, 0.0, f_amp)
    expected = (lindblad.static_hamiltonian(spec)
                + f_amp * ops.tensor([ops.pauli("x"), np.eye(2)]))
    assert np.allclose(h, expected)


def test_oscillatory_hamiltonian_periodic_and_hermitian():
    spec = make_spec()
    rng = np.random.default_rng(2)
    for t in rng.uniform(0, 10, size=4):
        h = lindblad.build_oscillatory_hamiltonian(spec, t, 0.4)
        assert np.abs(h - h.conj().T).max() < 1e-14
        h2 = lindblad.build_oscillatory_hamiltonian(spec, t + 2 * np.pi / spec.omega, 0.4)
        assert np.abs(h - h2).max() < 1e-12


def test_oscillatory_rejects_negative_amplitude():
    with pytest.raises(ValueError):
        lindblad.build_oscillatory_hamiltonian(make_spec(), 0.0, -1.0)


def test_dissipator_dark_on_charger_ground():
    spec = make_spec(n_bath=0.0)
    rho = ops.tensor([np.diag([1.0, 0.0]), np.diag([0.3, 0.7])]).astype(complex)
    assert np.abs(lindblad.dissipator(spec, rho)).max() < 1e-15


def test_dissipator_trace_free():
    spec = make_spec(n_bath=0.8)
    rng = np.random.default_rng(4)
    m = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    rho = m @ m.conj().T
    rho /= np.trace(rho)
    assert abs(np.trace(lindblad.dissipator(spec, rho))) < 1e-14


def test_dissipator_excited_decay_rate():
    spec = make_spec(n_bath=0.0)
    rho = excited_charger_ground_battery()
    drho = lindblad.dissipator(spec, rho)
    number = ops.tensor([np.diag([0.0, 1.0]), np.eye(2)])
    assert ops.expectation(drho, number).real == pytest.approx(-spec.gamma)


def test_adjoint_dissipator_unital():
    spec = make_spec(n_bath=1.2)
    assert np.abs(lindblad.adjoint_dissipator(spec, np.eye(4, dtype=complex))).max() < 1e-14


def test_adjoint_dissipator_duality():
    spec = make_spec(n_bath=0.6)
    rng = np.random.default_rng(5)
    for _ in range(5):
        m = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        rho = m @ m.conj().T
        rho /= np.trace(rho)
        x = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        lhs = np.trace(x @ lindblad.dissipator(spec, rho))
        rhs = np.trace(lindblad.adjoint_dissipator(spec, x) @ rho)
        assert abs(lhs - rhs) < 1e-12


def test_adjoint_on_charger_number_operator():
    spec = make_spec(n_bath=0.0)
    number = ops.tensor([np.diag([0.0, 1.0]), np.eye(2)]).astype(complex)
    assert np.allclose(lindblad.adjoint_dissipator(spec, number),
                       -spec.gamma * number)


def test_forward_propagation_stationary_ground():
    spec = make_spec(n_bath=0.0)
    grid = TimeGrid(2.0, 200)
    rho0 = lindblad.ground_state(spec)
    traj = lindblad.propagate_forward(spec, PulseProfile.zero(grid), rho0, grid)
    assert np.abs(traj[-1] - rho0).max() < 1e-12


def test_forward_propagation_exponential_decay():
    spec = make_spec(g=0.0, n_bath=0.0)
    grid = TimeGrid(5.0, 500)
    rho0 = excited_charger_ground_battery()
    traj = lindblad.propagate_forward(spec, PulseProfile.zero(grid), rho0, grid)
    number = ops.tensor([np.diag([0.0, 1.0]), np.eye(2)])
    for k in (100, 250, 500):
        t = grid.times[k]
        pop = ops.expectation(traj[k], number).real
        assert pop == pytest.approx(np.exp(-spec.gamma * t), abs=1e-6)


def test_backward_unitary_spectrum_preserved():
    spec = make_spec(gamma=0.0)
    grid = TimeGrid(3.0, 300)
    sigma_tau = lindblad.charged_battery_target(spec)
    back = lindblad.propagate_backward(spec, PulseProfile.zero(grid), sigma_tau, grid)
    ref = np.sort(np.linalg.eigvalsh(sigma_tau))
    for k in (0, 150, 299):
        assert np.abs(np.sort(np.linalg.eigvalsh(back[k])) - ref).max() < 1e-8


def test_forward_backward_pairing_constant_without_damping():
    spec = make_spec(gamma=0.0)
    grid = TimeGrid(3.0, 300)
    pulse = PulseProfile.sinusoidal(grid, amplitude=0.7, omega=spec.omega)
    fwd = lindblad.propagate_forward(spec, pulse, lindblad.ground_state(spec), grid)
    back = lindblad.propagate_backward(spec, pulse,
                                       lindblad.charged_battery_target(spec), grid)
    pairing = [np.trace(back[k] @ fwd[k]).real for k in range(0, 301, 50)]
    assert np.ptp(pairing) < 1e-8


def test_oscillatory_propagation_self_convergence():
    spec = make_spec()
    coarse = TimeGrid(np.pi / spec.g, 400)
    fine = TimeGrid(np.pi / spec.g, 4000)
    rho0 = lindblad.ground_state(spec)
    end_coarse = lindblad.propagate_oscillatory(spec, 0.5, rho0, coarse)[-1]
    end_fine = lindblad.propagate_oscillatory(spec, 0.5, rho0, fine)[-1]
    assert np.abs(end_coarse - end_fine).max() < 1e-4


def test_reduced_battery_state():
    spec = make_spec()
    rho = ops.tensor([np.diag([0.2, 0.8]), np.diag([0.35, 0.65])]).astype(complex)
    assert np.allclose(lindblad.reduced_battery_state(spec, rho),
                       np.diag([0.35, 0.65]))


def test_charged_battery_target_structure():
    spec = make_spec()
    tgt = lindblad.charged_battery_target(spec)
    assert np.allclose(tgt, ops.tensor([np.eye(2), np.diag([0.0, 1.0])]))
