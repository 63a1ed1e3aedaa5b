"""Reduced flows: right-hand sides, conservation, and integrator quality."""

import math

import numpy as np
import pytest

from stokes_pendulum import (
    EllipseGeometry,
    FlowKind,
    Handedness,
    PendulumConfig,
    StokesState,
    ValidationError,
    airy_precession_rate,
    hamiltonian,
    integrate,
    max_stable_dt,
    rhs_conservative,
    rhs_damped,
)

TWO_PI = 2.0 * math.pi


def test_rhs_twisting_only():
    c = PendulumConfig(omega=2.0)
    s = StokesState(0.3, -0.2, 0.5)
    d1, d2, d3 = rhs_conservative(s, c)
    assert d1 == pytest.approx(-0.375 * 2.0 * s.s2 * s.s3)
    assert d2 == pytest.approx(0.375 * 2.0 * s.s1 * s.s3)
    assert d3 == 0.0


def test_rhs_coriolis_doubled_rate():
    # rotation about s3 at twice the frame rate; s3 = 0 kills the twist term
    c = PendulumConfig(omega=1.0, Omega_rot=0.5)
    d1, d2, d3 = rhs_conservative(StokesState(1.0, 0.0, 0.0), c)
    assert (d1, d2, d3) == pytest.approx((0.0, -1.0, 0.0))


def test_rhs_anisotropy_rotation_about_s1():
    c = PendulumConfig(omega=1.0, delta_omega=0.2)
    s3 = 0.4
    d1, d2, d3 = rhs_conservative(StokesState(0.0, 0.0, s3), c)
    assert d1 == 0.0
    assert d2 == pytest.approx(-0.2 * s3)
    assert d3 == 0.0


def test_rhs_damped_isotropic():
    c = PendulumConfig(omega=1.0, gamma_x=0.3, gamma_y=0.3)
    s = StokesState(0.2, -0.1, 0.4)
    cons = rhs_conservative(s, c)
    damp = rhs_damped(s, c)
    for k, (dc, dd) in enumerate(zip(cons, damp)):
        assert dd - dc == pytest.approx(-0.3 * s.as_array()[k])


def test_rhs_damped_unidirectional_extremes():
    c = PendulumConfig(omega=1.0, gamma_x=0.4, gamma_y=0.0)
    s0 = 0.7
    # slow-axis linear orbit: no dissipation at all
    d = rhs_damped(StokesState(-s0, 0.0, 0.0), c)
    assert d == pytest.approx((0.0, 0.0, 0.0), abs=1e-15)
    # fast-axis linear orbit: maximum dissipation
    d = rhs_damped(StokesState(s0, 0.0, 0.0), c)
    assert d[0] == pytest.approx(-0.4 * s0)


def test_hamiltonian_values():
    c = PendulumConfig(omega=1.0, delta_omega=0.1, Omega_rot=0.2)
    assert hamiltonian(StokesState(0.0, 0.0, 0.0), c) == 0.0
    s0 = 0.5
    assert hamiltonian(StokesState(s0, 0.0, 0.0), c) == pytest.approx(0.1 * s0)

    # the degenerate-circle level of the symmetric pendulum: -16 Omega^2/(3 omega)
    c = PendulumConfig(omega=1.0, Omega_rot=0.2)
    s3 = 16.0 * 0.2 / 3.0
    expected = -2.0 * 0.2 * s3 + 0.1875 * s3 * s3
    assert hamiltonian(StokesState(0.0, 0.0, s3), c) == pytest.approx(expected)
    assert expected == pytest.approx(-16.0 * 0.2**2 / 3.0)


def test_airy_precession_rate_values():
    c = PendulumConfig(omega=1.0)
    assert airy_precession_rate(EllipseGeometry(a=0.2, b=0.0, psi=0.0), c) == 0.0
    e = EllipseGeometry(a=0.1, b=0.1, psi=0.0)
    assert airy_precession_rate(e, c) == pytest.approx(0.00375)
    e = EllipseGeometry(a=0.2, b=0.1, psi=0.0)
    assert airy_precession_rate(e, c) == pytest.approx(0.0075)
    e = EllipseGeometry(a=0.2, b=0.1, psi=0.0, handedness=Handedness.CLOCKWISE)
    assert airy_precession_rate(e, c) == pytest.approx(-0.0075)


def test_integrate_coriolis_half_turn():
    c = PendulumConfig(omega=1.0, Omega_rot=0.5)
    s0 = 0.8
    traj = integrate(
        StokesState(s0, 0.0, 0.0), c, FlowKind.CORIOLIS,
        t_end=math.pi / (2.0 * 0.5), dt=0.005,
    )
    np.testing.assert_allclose(
        traj.states[-1], [-s0, 0.0, 0.0], atol=1e-8
    )


def test_integrate_twisting_preserves_s3_and_advances_psi():
    c = PendulumConfig(omega=1.0)
    s = StokesState(0.3, 0.1, 0.4)
    traj = integrate(s, c, FlowKind.TWISTING, t_end=50.0, dt=0.1)
    assert np.max(np.abs(traj.states[:, 2] - s.s3)) <= 1e-12
    psi = 0.5 * np.unwrap(np.arctan2(traj.states[:, 1], traj.states[:, 0]))
    slope = np.polyfit(traj.times, psi, 1)[0]
    assert slope == pytest.approx(0.1875 * s.s3, rel=1e-6)


def test_integrate_combined_conservation():
    c = PendulumConfig(omega=1.0, delta_omega=0.1, Omega_rot=0.05)
    s = StokesState(0.5, -0.3, 0.6)
    traj = integrate(s, c, FlowKind.COMBINED, t_end=100.0, dt=0.02)
    s0_drift, h_drift = traj.max_relative_drift()
    assert s0_drift < 1e-8
    assert h_drift < 1e-8


def test_elementary_flows_exactly_preserve_their_axis():
    c = PendulumConfig(omega=1.0, delta_omega=0.2, Omega_rot=0.1)
    s = StokesState(0.4, 0.3, -0.5)
    # the preserved component never enters its own update, so RK4 keeps it bitwise
    t = integrate(s, c, FlowKind.ANISOTROPY, 30.0, 0.05)
    assert np.max(np.abs(t.states[:, 0] - s.s1)) == 0.0
    t = integrate(s, c, FlowKind.CORIOLIS, 30.0, 0.05)
    assert np.max(np.abs(t.states[:, 2] - s.s3)) == 0.0
    t = integrate(s, c, FlowKind.TWISTING, 30.0, 0.05)
    assert np.max(np.abs(t.states[:, 2] - s.s3)) == 0.0


def test_isotropic_damping_exponential_s0():
    gamma = 0.05
    c = PendulumConfig(omega=1.0, delta_omega=0.1, Omega_rot=0.05,
                       gamma_x=gamma, gamma_y=gamma)
    s = StokesState(0.4, 0.3, -0.5)
    traj = integrate(s, c, FlowKind.DAMPED_COMBINED, t_end=40.0, dt=0.02)
    expected = s.s0 * np.exp(-gamma * traj.times)
    np.testing.assert_allclose(traj.s0_values, expected, rtol=1e-6)


def test_damped_run_still_records_h():
    c = PendulumConfig(omega=1.0, delta_omega=0.1, gamma_x=0.1)
    traj = integrate(StokesState(0.3, 0.0, 0.1), c, FlowKind.DAMPED_COMBINED, 5.0, 0.01)
    assert len(traj.h_values) == len(traj.times)
    assert traj.h_values[-1] != traj.h_values[0]  # not conserved, only logged


def test_rk4_order_convergence():
    c = PendulumConfig(omega=1.0, delta_omega=0.2, Omega_rot=0.1)
    s = StokesState(0.6, 0.0, 0.8)
    t_end = 20.0

    def endpoint(dt):
        return integrate(s, c, FlowKind.COMBINED, t_end, dt).states[-1]

    ref = endpoint(0.1 / 8)
    e1 = np.linalg.norm(endpoint(0.1) - ref)
    e2 = np.linalg.norm(endpoint(0.05) - ref)
    assert 12.0 < e1 / e2 < 20.0


def test_time_reversal():
    """Velocity reversal maps s3 -> -s3 and flips the frame rotation."""
    c = PendulumConfig(omega=1.0, delta_omega=0.15, Omega_rot=0.05)
    c_rev = PendulumConfig(omega=1.0, delta_omega=0.15, Omega_rot=-0.05)
    s = StokesState(0.4, 0.2, -0.3)
    t_end = 30.0
    fwd = integrate(s, c, FlowKind.COMBINED, t_end, 0.02).final_state
    flipped = StokesState(fwd.s1, fwd.s2, -fwd.s3)
    back = integrate(flipped, c_rev, FlowKind.COMBINED, t_end, 0.02).final_state
    np.testing.assert_allclose(
        [back.s1, back.s2, -back.s3], s.as_array(), atol=1e-8
    )


def test_step_guard_names_limiting_rate():
    c = PendulumConfig(omega=1.0, delta_omega=0.01, Omega_rot=0.3)
    dt_max, name = max_stable_dt(c, s0=0.1)
    assert "Coriolis" in name
    assert dt_max == pytest.approx(0.05 / 0.6)
    with pytest.raises(ValidationError, match="Coriolis"):
        integrate(StokesState(0.1, 0.0, 0.0), c, FlowKind.COMBINED, 1.0, dt=1.0)

    c = PendulumConfig(omega=1.0, gamma_x=10.0)
    with pytest.raises(ValidationError, match="damping"):
        integrate(StokesState(0.1, 0.0, 0.0), c, FlowKind.DAMPED_COMBINED, 1.0, dt=0.1)


def test_trajectory_csv_export(tmp_path):
    c = PendulumConfig(omega=1.0, delta_omega=0.1)
    traj = integrate(StokesState(0.2, 0.0, 0.1), c, FlowKind.COMBINED, 1.0, 0.01)
    path = tmp_path / "traj.csv"
    traj.to_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "t,s1,s2,s3,s0,H"
    assert len(lines) == len(traj.times) + 1
    first = [float(v) for v in lines[1].split(",")]
    assert first == pytest.approx([0.0, 0.2, 0.0, 0.1, math.hypot(0.2, 0.1),
                                   hamiltonian(StokesState(0.2, 0.0, 0.1), c)])
    # full precision round trip
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    np.testing.assert_array_equal(data[:, 1:4], traj.states)


def test_integrator_matches_public_rhs_one_step():
    """The integrator's internal flow closures agree with the public RHS."""
    c = PendulumConfig(omega=1.3, delta_omega=0.21, Omega_rot=0.07,
                       gamma_x=0.02, gamma_y=0.05)
    s = StokesState(0.31, -0.22, 0.41)
    h = 1e-3

    def rk4_reference(y):
        def f(v):
            return np.array(rhs_damped(StokesState.from_array(v), c))

        k1 = f(y)
        k2 = f(y + 0.5 * h * k1)
        k3 = f(y + 0.5 * h * k2)
        k4 = f(y + h * k3)
        return y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

    traj = integrate(s, c, FlowKind.DAMPED_COMBINED, h, h)
    np.testing.assert_allclose(
        traj.states[1], rk4_reference(s.as_array()), rtol=0, atol=1e-16
    )
