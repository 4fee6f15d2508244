import math

import numpy as np
import pytest

from qbcharge import gaussian
from qbcharge.grids import PulseProfile, TimeGrid


def make_spec(**kwargs):
    defaults = dict(omega=1.0, g=0.2, gamma=0.01, mu=0.1, n_bath=1.0)
    defaults.update(kwargs)
    return gaussian.OscillatorSystemSpec(**defaults)


ALPHA = math.sqrt(3.0 / 5.0) * (1 + 1j)


def test_spec_validation():
    with pytest.raises(ValueError):
        make_spec(gamma=-0.01)
    with pytest.raises(ValueError):
        make_spec(n_bath=-1.0)


def test_forward_generator_c_row_is_zero():
    gen = gaussian.build_forward_generator(make_spec(), eps=0.7)
    assert np.all(gen[0] == 0.0)


def test_forward_generator_drive_entry():
    spec = make_spec()
    eps = 0.63
    gen = gaussian.build_forward_generator(spec, eps)
    assert gen[3, 0] == pytest.approx(math.sqrt(2 * spec.omega) * spec.mu * eps)


def test_forward_generator_diffusion_entry():
    spec = make_spec(n_bath=0.8)
    gen = gaussian.build_forward_generator(spec, 0.0)
    assert gen[5, 0] == pytest.approx(
        spec.gamma * (spec.n_bath + 0.5) / spec.omega)


def test_free_harmonic_rotation():
    spec = make_spec(g=0.0, gamma=0.0)
    grid = TimeGrid(0.5 * math.pi / spec.omega, 2000)
    psi0 = gaussian.vacuum_moments(spec.omega)
    psi0[1] = 1.0  # <x1> = 1
    psi0[5] += 1.0  # keep V consistent with the shifted first moment
    traj = gaussian.propagate_moments(spec, PulseProfile.zero(grid), psi0, grid)
    assert abs(traj[-1][1]) < 1e-8
    assert traj[-1][3] == pytest.approx(-spec.omega, abs=1e-8)


def test_backward_generator_difference_matrix():
    for spec in (make_spec(), make_spec(gamma=0.13, n_bath=2.2, g=0.31)):
        af = gaussian.build_forward_generator(spec, 0.42)
        ab = gaussian.build_backward_generator(spec, 0.42)
        m = gaussian.difference_matrix(spec)
        assert np.abs(af - ab - m).max() < 1e-14
        # the shift: +gamma on every non-c diagonal, doubled diffusion in col c
        expected = spec.gamma * np.eye(15)
        expected[0, 0] = 0.0
        expected[5, 0] = 2 * spec.gamma * (spec.n_bath + 0.5) / spec.omega
        expected[12, 0] = 2 * spec.gamma * spec.omega * (spec.n_bath + 0.5)
        assert np.abs(m - expected).max() < 1e-14


def test_backward_equals_forward_without_damping():
    spec = make_spec(gamma=0.0)
    af = gaussian.build_forward_generator(spec, 1.3)
    ab = gaussian.build_backward_generator(spec, 1.3)
    assert np.abs(af - ab).max() == 0.0


def _taylor_step_matrix(gen, dt):
    p = np.eye(gen.shape[0])
    term = p
    for m in range(1, 5):
        term = (dt / m) * (gen @ term)
        p = p + term
    return p


def test_backward_forward_pairing_constant_without_damping():
    spec = make_spec(gamma=0.0)
    grid = TimeGrid(math.pi / spec.g, 2000)
    pulse = PulseProfile.sinusoidal(grid, amplitude=1.0, omega=spec.omega)
    # forward with the field held constant over each interval
    fwd = [gaussian.vacuum_moments()]
    for eps in pulse.half_values:
        step = _taylor_step_matrix(gaussian.build_forward_generator(spec, eps),
                                   grid.dt)
        fwd.append(step @ fwd[-1])
    # backward equation (A_b = A_f at gamma=0) integrated as the exact
    # inverse of the forward step, so the pairing must be conserved
    chi = gaussian.coherent_moments(0.0, ALPHA)
    pairs = {grid.n_steps: gaussian.gaussian_overlap(chi, fwd[-1])}
    for k in range(grid.n_steps - 1, -1, -1):
        step = _taylor_step_matrix(
            gaussian.build_backward_generator(spec, pulse.half_values[k]), grid.dt)
        chi = np.linalg.solve(step, chi)
        if k % 500 == 0:
            pairs[k] = gaussian.gaussian_overlap(chi, fwd[k])
    values = np.array(list(pairs.values()))
    assert np.ptp(values) < 1e-8


def test_vacuum_is_stationary():
    spec = make_spec(n_bath=0.0)
    grid = TimeGrid(10.0, 1000)
    traj = gaussian.propagate_moments(spec, PulseProfile.zero(grid),
                                      gaussian.vacuum_moments(), grid)
    assert np.abs(traj[-1] - traj[0]).max() < 1e-10


def test_charger_thermalizes_to_bath_occupation():
    spec = make_spec(g=0.0, gamma=0.2, n_bath=1.7)
    grid = TimeGrid(80.0, 8000)
    traj = gaussian.propagate_moments(spec, PulseProfile.zero(grid),
                                      gaussian.vacuum_moments(), grid)
    occupation = gaussian.charger_energy(traj[-1], spec.omega) / spec.omega
    assert occupation == pytest.approx(spec.n_bath, abs=1e-4)


def test_forward_c_component_stays_one():
    spec = make_spec()
    grid = TimeGrid(math.pi / spec.g, 500)
    pulse = PulseProfile.sinusoidal(grid, amplitude=2.0, omega=spec.omega)
    traj = gaussian.propagate_moments(spec, pulse, gaussian.vacuum_moments(), grid)
    assert max(abs(psi[0] - 1.0) for psi in traj) < 1e-10


def test_uncertainty_relation_along_trajectory():
    spec = make_spec()
    grid = TimeGrid(math.pi / spec.g, 1000)
    pulse = PulseProfile.sinusoidal(grid, amplitude=2.0, omega=spec.omega)
    traj = gaussian.propagate_moments(spec, pulse, gaussian.vacuum_moments(), grid)
    assert min(gaussian.uncertainty_defect(psi) for psi in traj[::100]) > -1e-8


def test_battery_energy_examples():
    assert gaussian.battery_energy(gaussian.vacuum_moments()) == pytest.approx(0.0)
    coherent = gaussian.coherent_moments(0.0, ALPHA)
    assert gaussian.battery_energy(coherent) == pytest.approx(1.2)
    n_th = 0.35
    thermal_cov = gaussian.vacuum_covariance()
    thermal_cov[1, 1] += n_th
    thermal_cov[3, 3] += n_th
    thermal = gaussian.moment_vector(np.zeros(4), thermal_cov)
    assert gaussian.battery_energy(thermal) == pytest.approx(n_th)


def test_gaussian_ergotropy_examples():
    assert gaussian.gaussian_ergotropy(gaussian.vacuum_moments()) == pytest.approx(0.0)
    coherent = gaussian.coherent_moments(0.0, ALPHA)
    assert gaussian.gaussian_ergotropy(coherent) == pytest.approx(1.2)
    n_th = 0.6
    thermal_cov = gaussian.vacuum_covariance()
    thermal_cov[1, 1] += n_th
    thermal_cov[3, 3] += n_th
    thermal = gaussian.moment_vector(np.zeros(4), thermal_cov)
    assert gaussian.gaussian_ergotropy(thermal) == pytest.approx(0.0, abs=1e-12)


def test_update_trace_trivial_cases():
    vac = gaussian.vacuum_moments()
    assert gaussian.moment_field_update_trace(vac, vac, 0.5) == pytest.approx(0.0)
    chi = gaussian.coherent_moments(0.3 + 0.1j, ALPHA)
    assert gaussian.moment_field_update_trace(chi, vac, 0.0) == 0.0


def test_overlap_of_identical_coherent_states_is_one():
    psi = gaussian.coherent_moments(0.4 - 0.2j, ALPHA)
    assert gaussian.gaussian_overlap(psi, psi) == pytest.approx(1.0)


def test_overlap_of_displaced_coherent_states():
    a, b = 0.9 + 0.2j, -0.3 + 0.5j
    psi = gaussian.coherent_moments(a, 0.0)
    chi = gaussian.coherent_moments(b, 0.0)
    assert gaussian.gaussian_overlap(chi, psi) == pytest.approx(
        math.exp(-abs(a - b) ** 2))


def test_fock_oracle_vacuum_stationary():
    spec = make_spec(n_bath=0.0)
    grid = TimeGrid(2.0, 100)
    oracle = gaussian.fock_oracle(spec, PulseProfile.zero(grid), grid, n_trunc=6)
    assert np.abs(oracle.moments[-1] - oracle.moments[0]).max() < 1e-10


def test_fock_oracle_purity_preserved_at_zero_temperature():
    spec = make_spec(gamma=0.0, n_bath=0.0)
    grid = TimeGrid(3.0, 300)
    pulse = PulseProfile.sinusoidal(grid, amplitude=1.0, omega=spec.omega)
    oracle = gaussian.fock_oracle(spec, pulse, grid, n_trunc=14, keep_states=True)
    rho = oracle.final_state
    assert np.trace(rho @ rho).real == pytest.approx(1.0, abs=1e-6)


def test_fock_oracle_truncation_guard():
    spec = make_spec()
    grid = TimeGrid(math.pi / spec.g, 200)
    pulse = PulseProfile.sinusoidal(grid, amplitude=20.0, omega=spec.omega)
    with pytest.raises(gaussian.TruncationError):
        gaussian.fock_oracle(spec, pulse, grid, n_trunc=6)


def test_moments_from_fock_roundtrip_coherent():
    alpha = 0.6 - 0.4j
    n_trunc = 16
    ket = np.kron(gaussian.coherent_fock_state(alpha, n_trunc),
                  gaussian.coherent_fock_state(0.2j, n_trunc))
    rho = np.outer(ket, ket.conj())
    psi = gaussian.moments_from_fock(rho, n_trunc)
    assert np.abs(psi - gaussian.coherent_moments(alpha, 0.2j)).max() < 1e-9


def test_first_moment_linearity_in_pulse():
    spec = make_spec(gamma=0.0, n_bath=0.0)
    grid = TimeGrid(math.pi / spec.g, 500)
    pulse = PulseProfile.sinusoidal(grid, amplitude=1.0, omega=spec.omega)
    double = PulseProfile.sinusoidal(grid, amplitude=2.0, omega=spec.omega)
    one = gaussian.propagate_moments(spec, pulse, gaussian.vacuum_moments(), grid)
    two = gaussian.propagate_moments(spec, double, gaussian.vacuum_moments(), grid)
    assert np.abs(2 * gaussian.first_moments(one[-1])
                  - gaussian.first_moments(two[-1])).max() < 1e-10


def test_temperature_separation_for_fixed_pulse():
    spec0 = make_spec(n_bath=0.0)
    grid = TimeGrid(math.pi / spec0.g, 1000)
    pulse = PulseProfile.sinusoidal(grid, amplitude=2.0, omega=spec0.omega)
    vac = gaussian.vacuum_moments()
    ergs, energies, free_energies = [], [], []
    for n_bath in (0.0, 1.0, 3.0):
        spec = make_spec(n_bath=n_bath)
        driven = gaussian.propagate_moments(spec, pulse, vac, grid)[-1]
        undriven = gaussian.propagate_moments(spec, PulseProfile.zero(grid),
                                              vac, grid)[-1]
        ergs.append(gaussian.gaussian_ergotropy(driven))
        energies.append(gaussian.battery_energy(driven)
                        - gaussian.battery_energy(undriven))
    assert np.ptp(ergs) < 1e-8
    zero_t = gaussian.propagate_moments(spec0, pulse, vac, grid)[-1]
    assert np.abs(np.array(energies) - gaussian.battery_energy(zero_t)).max() < 1e-8
