"""Cole-Hopf oracle: exactness, gauge invariance, domain guards."""
import numpy as np
import pytest

from burgulence import DomainError, NumericsError, sine_field
from burgulence.cole_hopf import HeatPotential, _velocity_from_potential, heat_potential, solve_classical
from burgulence.solver import seeded_initial


def test_identity_at_t_zero():
    u0 = sine_field(256)
    out = solve_classical(u0, 0.1, 0.0, 256)
    assert np.max(np.abs(out.samples - u0.samples)) <= 1e-10


def test_identity_at_t_zero_seeded():
    u0 = seeded_initial(4, 256)
    out = solve_classical(u0, 0.05, 0.0, 256)
    assert np.max(np.abs(out.samples - u0.samples)) <= 1e-10


def test_odd_symmetry_preserved():
    # sin initial data stays odd about x=0, so u(t, 0) = 0
    u0 = sine_field(256)
    out = solve_classical(u0, 0.1, 0.1, 256)
    assert abs(out.samples[0]) <= 1e-12
    np.testing.assert_allclose(out.samples[1:], -out.samples[1:][::-1], atol=1e-11)


def test_small_amplitude_heat_decay():
    # linearized Burgers is the heat equation: coefficient decays exactly
    n = 256
    x = np.arange(n) / n
    from burgulence import PeriodicField

    u0 = PeriodicField(1e-8 * np.sin(2 * np.pi * x))
    out = solve_classical(u0, 0.1, 0.2, n)
    expected = 1e-8 * 0.5 * np.exp(-4 * np.pi**2 * 0.1 * 0.2)
    assert abs(out.coeff(1)) == pytest.approx(expected, rel=1e-6)


def test_oversampling_self_consistency():
    u0 = seeded_initial(8, 512)
    a = solve_classical(u0, 0.05, 0.5, 512, oversample=4)
    b = solve_classical(u0, 0.05, 0.5, 512, oversample=8)
    assert np.max(np.abs(a.samples - b.samples)) <= 1e-11


def test_amplitude_bound():
    # |u(t)|_inf <= min(D, 1/t) for the classical flux
    u0 = sine_field(512)
    D = max(1 / u0.norm(0, 1), u0.norm(1, np.inf))
    for t in (0.2, 0.5, 1.0, 2.0):
        out = solve_classical(u0, 0.05, t, 512)
        assert out.norm(0, np.inf) <= min(D, 1 / t) * (1 + 1e-6)


def test_energy_non_increasing():
    u0 = seeded_initial(12, 512)
    es = []
    for t in np.linspace(0.0, 1.0, 11):
        out = solve_classical(u0, 0.05, t, 512)
        es.append(np.mean(out.samples**2))
    assert all(b <= a * (1 + 1e-12) for a, b in zip(es, es[1:]))


def test_gauge_invariance():
    # scaling phi0 by any positive constant cancels in -2 nu phi_x / phi
    u0 = sine_field(256)
    pot = heat_potential(u0, 0.05, 1024)
    scaled = HeatPotential(phi0_coeffs=pot.phi0_coeffs * 7.25, nu=pot.nu, n_grid=pot.n_grid)
    a = _velocity_from_potential(pot, 0.3, 256)
    b = _velocity_from_potential(scaled, 0.3, 256)
    assert np.max(np.abs(a.samples - b.samples)) <= 1e-12


def test_nu_floor_enforced():
    with pytest.raises(DomainError):
        solve_classical(sine_field(256), 5e-5, 0.1, 256)


def test_overflow_guard():
    # at nu=1e-4 a unit sine has exp range exp(1/(pi*2e-4)) >> 1e300
    with pytest.raises(NumericsError):
        solve_classical(sine_field(256), 1e-4, 0.1, 256)


def test_negative_time_rejected():
    with pytest.raises(DomainError):
        solve_classical(sine_field(256), 0.1, -0.1, 256)
