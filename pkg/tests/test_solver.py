"""Viscous solver: stability, accuracy against the exact oracle, stats."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from burgulence import ConfigError, DomainError, InstabilityError, PeriodicField, make_flux, sine_field
from burgulence.cole_hopf import solve_classical
from burgulence.solver import (
    RunConfig,
    StepStats,
    _quantize_dt,
    config_hash,
    energy_balance_residual,
    integrate,
    resolution_floor,
    seeded_initial,
    stable_dt,
    step,
    trajectory_to_files,
)


def make_config(**kw):
    defaults = dict(
        nu=0.05,
        flux=make_flux("quadratic"),
        u0=sine_field(512),
        n_grid=512,
        t_end=0.5,
        snapshot_times=np.array([0.1, 0.2, 0.3, 0.4, 0.5]),
    )
    defaults.update(kw)
    return RunConfig(**defaults)


# ------------------------------------------------------------- resolution

def test_resolution_floor_values():
    assert resolution_floor(0.05) == 512
    assert resolution_floor(1e-2) == 2048
    assert resolution_floor(3e-3) == 8192
    assert resolution_floor(1e-3) == 16384
    assert resolution_floor(1.0) == 16
    assert resolution_floor(10.0) == 16  # never below the field minimum
    assert resolution_floor(1 / 64) == 1024  # exact power of two boundary


def test_stable_dt():
    cfg = make_config(u0=sine_field(1024), n_grid=1024)
    assert stable_dt(cfg.u0, cfg) == pytest.approx(0.4 / 1024, rel=1e-12)
    cfg2 = make_config(u0=sine_field(2048), n_grid=2048)
    assert stable_dt(cfg2.u0, cfg2) == pytest.approx(stable_dt(cfg.u0, cfg) / 2)
    zero = PeriodicField(np.zeros(512))
    assert stable_dt(zero, make_config(u0=zero)) == 1 / 512


@settings(max_examples=50, deadline=None)
@given(dt=st.floats(1e-12, 1.0))
def test_quantize_dt(dt):
    q = _quantize_dt(dt)
    assert q <= dt * (1 + 1e-12)
    assert q >= dt * 16 / 17 * (1 - 1e-12)  # 16 mantissa levels per octave


# ------------------------------------------------------------------- step

def test_step_zero_field_fixed_point():
    zero = PeriodicField(np.zeros(512))
    cfg = make_config(u0=zero)
    out = step(zero, 1e-4, cfg)
    assert np.all(out.samples == 0.0)


def test_step_linearized_decay():
    # amplitude 1e-6 mode: one step must reproduce exact heat decay to 1e-9
    x = np.arange(256) / 256
    tiny = PeriodicField(1e-6 * np.sin(2 * np.pi * x))
    cfg = make_config(nu=0.1, u0=tiny, n_grid=256, t_end=1.0, snapshot_times=np.array([1.0]))
    out = step(tiny, 1e-3, cfg)
    ratio = abs(out.coeff(1)) / abs(tiny.coeff(1))
    assert ratio == pytest.approx(np.exp(-4 * np.pi**2 * 0.1 * 1e-3), rel=1e-9)


def test_step_rejects_oversized_dt():
    cfg = make_config()
    with pytest.raises(DomainError):
        step(cfg.u0, 1.0, cfg)


# -------------------------------------------------------------- integrate

def test_trivial_run_returns_initial_state():
    u0 = sine_field(512)
    cfg = make_config(u0=u0, t_end=0.0, snapshot_times=np.array([0.0]))
    traj = integrate(cfg)
    assert len(traj.snapshots) == 1
    t, f = traj.snapshots[0]
    assert t == 0.0
    np.testing.assert_array_equal(f.samples, u0.samples)


def test_matches_cole_hopf_oracle():
    u0 = sine_field(512)
    cfg = make_config(u0=u0)
    traj = integrate(cfg)
    assert len(traj.snapshots) == 5
    for t, f in traj.snapshots:
        ref = solve_classical(u0, 0.05, t, 512)
        assert np.max(np.abs(f.samples - ref.samples)) <= 1e-8


def test_snapshots_zero_mean_and_energy_decay():
    traj = integrate(make_config(u0=seeded_initial(3, 512)))
    energies = []
    for _, f in traj.snapshots:
        assert abs(f.samples.mean()) <= 1e-11
        energies.append(np.mean(f.samples**2))
    assert all(b <= a * (1 + 1e-9) for a, b in zip(energies, energies[1:]))


def test_stats_structure():
    cfg = make_config()
    traj = integrate(cfg)
    st_ = traj.stats
    assert st_.t[0] == 0.0
    assert st_.t[-1] == cfg.t_end
    assert st_.dt[-1] == 0.0  # terminal row records the final state
    assert np.all(st_.dt[:-1] > 0)
    assert np.all(np.diff(st_.t) > 0)
    assert np.all(st_.energy > 0)
    np.testing.assert_array_equal(st_.step, np.arange(len(st_)))


def test_energy_balance_linear_regime():
    # single tiny mode: both sides of d|u|^2/dt = -2 nu ||u||_1^2 are exact,
    # so the residual is pure trapezoid error; keep intervals short
    x = np.arange(256) / 256
    tiny = PeriodicField(1e-8 * np.sin(2 * np.pi * x))
    times = np.linspace(4e-4, 0.05, 125)
    cfg = make_config(nu=0.1, u0=tiny, n_grid=256, t_end=0.05, snapshot_times=times)
    traj = integrate(cfg)
    assert energy_balance_residual(traj) <= 1e-8


def test_energy_balance_turbulent_run():
    cfg = make_config(u0=seeded_initial(42, 512), t_end=1.0,
                      snapshot_times=np.linspace(0.1, 1.0, 10))
    traj = integrate(cfg)
    assert energy_balance_residual(traj) <= 1e-4


def test_grid_refinement_convergence():
    # halving dx at fixed nu barely moves snapshot L2 values
    times = np.linspace(0.1, 1.0, 10)
    t1 = integrate(make_config(u0=seeded_initial(42, 512), t_end=1.0, snapshot_times=times))
    t2 = integrate(make_config(u0=seeded_initial(42, 1024), n_grid=1024, t_end=1.0,
                               snapshot_times=times))
    for (ta, fa), (tb, fb) in zip(t1.snapshots, t2.snapshots):
        assert abs(fa.norm(0, 2) - fb.norm(0, 2)) <= 1e-6


def test_determinism_bit_identical():
    cfg = make_config(u0=seeded_initial(9, 512))
    a = integrate(cfg)
    b = integrate(cfg)
    for (ta, fa), (tb, fb) in zip(a.snapshots, b.snapshots):
        assert ta == tb
        np.testing.assert_array_equal(fa.samples, fb.samples)


def test_slope_bound_along_run():
    # one-sided slope bound max u_x <= min(D, 1/t) for sigma = 1
    u0 = seeded_initial(5, 512)
    D = max(1 / u0.norm(0, 1), u0.norm(1, np.inf))
    times = np.linspace(0.2, 2.0, 10)
    traj = integrate(make_config(u0=u0, t_end=2.0, snapshot_times=times))
    for t, f in traj.snapshots:
        assert np.max(f.derivative().samples) <= min(D, 1 / t) * (1 + 1e-3)


def test_blowup_detected():
    # no dealiasing plus cfl at the stability edge: aliasing pumps mid-band
    x = np.arange(16) / 16
    cfg = RunConfig(
        nu=1.0,
        flux=make_flux("quadratic", u_max=1e6),
        u0=PeriodicField(200 * np.sin(2 * np.pi * x)),
        n_grid=16,
        t_end=1.0,
        snapshot_times=np.array([1.0]),
        cfl_safety=1.0,
        dealias_fraction=1.0,
    )
    with pytest.raises(InstabilityError) as exc:
        integrate(cfg)
    assert exc.value.step >= 0


# ------------------------------------------------------------ validation

def test_config_validation():
    with pytest.raises(ConfigError):
        make_config(nu=-0.1)
    with pytest.raises(ConfigError):
        make_config(nu=1e-3)  # 512 below the resolution floor 16384
    with pytest.raises(ConfigError):
        make_config(u0=sine_field(256))  # grid mismatch
    with pytest.raises(ConfigError):
        make_config(snapshot_times=np.array([0.3, 0.2]))
    with pytest.raises(ConfigError):
        make_config(snapshot_times=np.array([0.1, 0.9]))  # beyond t_end
    with pytest.raises(ConfigError):
        make_config(cfl_safety=0.0)
    with pytest.raises(ConfigError):
        make_config(cfl_safety=1.5)
    with pytest.raises(ConfigError):
        make_config(dealias_fraction=0.0)
    with pytest.raises(ConfigError):
        make_config(t_end=-1.0)
    with pytest.raises(ConfigError):
        make_config(snapshot_times=np.array([]))


# ---------------------------------------------------------- initial family

def test_seeded_initial_normalisation():
    for seed in range(5):
        u0 = seeded_initial(seed, 1024)
        assert abs(u0.samples.mean()) < 1e-14
        assert u0.norm(0, np.inf) == pytest.approx(1.0, abs=1e-4)


def test_seeded_initial_band_limited():
    u0 = seeded_initial(11, 512, j_max=8)
    assert np.all(np.abs(u0.coeffs[9:]) < 1e-14)
    assert np.any(np.abs(u0.coeffs[1:9]) > 1e-3)


def test_seeded_initial_grid_independent():
    # same seed gives the same continuum profile on every grid
    a = seeded_initial(7, 1024)
    b = seeded_initial(7, 256)
    np.testing.assert_allclose(a.samples[::4], b.samples, atol=1e-13)


def test_seeded_initial_distinct_seeds():
    a = seeded_initial(0, 256)
    b = seeded_initial(1, 256)
    assert np.max(np.abs(a.samples - b.samples)) > 1e-3


# ------------------------------------------------------------ persistence

def test_config_hash_sensitivity():
    a = make_config()
    b = make_config()
    assert config_hash(a) == config_hash(b)
    c = make_config(nu=0.06)
    assert config_hash(a) != config_hash(c)
    d = make_config(u0=seeded_initial(1, 512))
    assert config_hash(a) != config_hash(d)


def test_trajectory_files_round_trip(tmp_path):
    from burgulence.field import read_binary_sequence

    traj = integrate(make_config(u0=seeded_initial(2, 512)))
    fbin = tmp_path / "fields.bin"
    fcsv = tmp_path / "stats.csv"
    trajectory_to_files(traj, fbin, fcsv, header="config_hash=abc version=0")
    recs = read_binary_sequence(fbin)
    assert len(recs) == len(traj.snapshots)
    for (f, t, nu), (t2, f2) in zip(recs, traj.snapshots):
        assert t == t2 and nu == 0.05
        np.testing.assert_array_equal(f.samples, f2.samples)
    st_ = StepStats.from_csv(fcsv)
    np.testing.assert_array_equal(st_.t, traj.stats.t)
    np.testing.assert_array_equal(st_.energy, traj.stats.energy)
