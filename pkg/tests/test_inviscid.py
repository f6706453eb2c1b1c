"""Lax-Oleinik entropy solutions, shock bookkeeping, characteristics cross-checks."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from burgulence.errors import DiscontinuityWarning, DomainError
from burgulence.field import PeriodicField, ramp_field, sine_field
from burgulence.flux import make_flux
from burgulence.inviscid import (
    characteristics_eval,
    lax_oleinik_eval,
    robust_slopes,
    shock_time,
    solve_inviscid,
)
from burgulence.solver import seeded_initial

QUAD = make_flux("quadratic")


# --------------------------------------------------------------- shock time

def test_shock_time_sine():
    # max of -d/dx f'(sin 2 pi x) is 2 pi
    assert shock_time(sine_field(1024), QUAD) == pytest.approx(1 / (2 * np.pi), rel=1e-10)


def test_shock_time_scales_with_amplitude_and_mode():
    assert shock_time(sine_field(1024, amplitude=2.0), QUAD) == pytest.approx(
        1 / (4 * np.pi), rel=1e-10
    )
    assert shock_time(sine_field(1024, mode=4), QUAD) == pytest.approx(
        1 / (8 * np.pi), rel=1e-10
    )


def test_shock_time_ramp_is_infinite_and_flags_the_jump():
    with pytest.warns(DiscontinuityWarning):
        assert shock_time(ramp_field(1024), QUAD) == np.inf


def test_shock_time_constant_field_rejected():
    with pytest.raises(DomainError):
        shock_time(PeriodicField(np.zeros(64)), QUAD)


def test_robust_slopes_masks_jump_neighborhood():
    slopes, valid, has_jump = robust_slopes(ramp_field(256))
    assert has_jump
    assert not valid.all()
    # away from the jump the sawtooth has unit slope exactly
    np.testing.assert_allclose(slopes[valid], 1.0, atol=1e-12)

    slopes, valid, has_jump = robust_slopes(sine_field(256))
    assert not has_jump and valid.all()
    x = np.arange(256) / 256
    np.testing.assert_allclose(slopes, 2 * np.pi * np.cos(2 * np.pi * x), atol=1e-10)


# ------------------------------------------------------- single-point oracle

def test_lax_oleinik_sine_symmetry_point():
    ul, ur = lax_oleinik_eval(sine_field(1024), QUAD, 0.05, 0.0)
    assert abs(ul) < 1e-12 and abs(ur) < 1e-12


def test_lax_oleinik_ramp_smooth_point():
    # u(t,x) = (x - 1/2)/(1 + t) solves the ramp; at t=1, x=0.75 that is 0.125
    ul, ur = lax_oleinik_eval(ramp_field(1024), QUAD, 1.0, 0.75)
    assert ul == pytest.approx(0.125, abs=1e-10)
    assert ur == pytest.approx(0.125, abs=1e-10)


def test_lax_oleinik_ramp_standing_shock():
    ul, ur = lax_oleinik_eval(ramp_field(1024), QUAD, 1.0, 0.0)
    assert ul == pytest.approx(0.25, abs=1e-10)
    assert ur == pytest.approx(-0.25, abs=1e-10)


def test_lax_oleinik_rejects_nonpositive_t():
    with pytest.raises(DomainError):
        lax_oleinik_eval(sine_field(64), QUAD, 0.0, 0.3)
    with pytest.raises(DomainError):
        lax_oleinik_eval(sine_field(64), QUAD, -0.1, 0.3)


# ------------------------------------------------------------ characteristics

def test_characteristics_match_lax_oleinik_quadratic():
    u0 = sine_field(1024)
    t = 0.5 * shock_time(u0, QUAD)
    for x in np.arange(16) / 16:
        a = characteristics_eval(u0, QUAD, t, float(x))
        ul, ur = lax_oleinik_eval(u0, QUAD, t, float(x))
        assert abs(ul - ur) < 1e-10
        assert abs(a - ul) < 1e-10


@pytest.mark.parametrize("kind,eps", [("cosh", 0.0), ("quartic", 0.3)])
def test_characteristics_match_lax_oleinik_other_fluxes(kind, eps):
    flux = make_flux(kind, epsilon=eps)
    u0 = sine_field(512, amplitude=0.9)
    t = 0.5 * shock_time(u0, flux)
    for x in np.arange(8) / 8:
        a = characteristics_eval(u0, flux, t, float(x))
        ul, ur = lax_oleinik_eval(u0, flux, t, float(x))
        assert abs(ul - ur) < 1e-10
        assert abs(a - ul) < 1e-10


def test_characteristics_small_time_continuity():
    u0 = sine_field(512)
    t = 1e-3
    bound = 2 * (2 * np.pi) * 1.0 * t  # 2 |u0|_{1,inf} f'(max u0) t
    for x in (0.2, 0.55, 0.9):
        v = characteristics_eval(u0, QUAD, t, x)
        assert abs(v - float(u0.eval_at(x)[0])) <= bound


def test_characteristics_domain_errors():
    u0 = sine_field(256)
    t_star = shock_time(u0, QUAD)
    with pytest.raises(DomainError):
        characteristics_eval(u0, QUAD, t_star * 1.01, 0.3)
    with pytest.raises(DomainError):
        characteristics_eval(u0, QUAD, 0.0, 0.3)


@settings(max_examples=10, deadline=None)
@given(
    seed=st.integers(min_value=0, max_value=10_000),
    frac=st.floats(min_value=0.1, max_value=0.8),
    x=st.floats(min_value=0.0, max_value=1.0, exclude_max=True),
)
def test_preshock_oracles_agree_property(seed, frac, x):
    u0 = seeded_initial(seed, 64)
    t = frac * shock_time(u0, QUAD)
    a = characteristics_eval(u0, QUAD, t, x)
    ul, ur = lax_oleinik_eval(u0, QUAD, t, x)
    assert abs(ul - ur) < 1e-10
    assert abs(a - ul) < 1e-8


# ----------------------------------------------------------------- grid solve

def test_solve_ramp_closed_form():
    sol = solve_inviscid(ramp_field(1024), QUAD, 1.0, 64)
    x = np.arange(64) / 64
    want = (x - 0.5) / 2
    want[0] = 0.0  # standing shock stores the midpoint value
    np.testing.assert_allclose(sol.field.samples, want, atol=1e-12)
    assert len(sol.shocks) == 1
    xs, ul, ur = sol.shocks[0]
    assert xs == pytest.approx(0.0, abs=1e-10)
    assert ul == pytest.approx(0.25, abs=1e-10)
    assert ur == pytest.approx(-0.25, abs=1e-10)
    assert sol.y_minus[0] == pytest.approx(-0.25, abs=1e-10)
    assert sol.y_plus[0] == pytest.approx(0.25, abs=1e-10)


def test_solve_nwave_slope_bound_and_symmetry():
    u0 = sine_field(1024)
    t = 2 * shock_time(u0, QUAD)
    sol = solve_inviscid(u0, QUAD, t, 256)
    u = sol.field.samples
    fwd = (np.roll(u, -1) - u) * 256
    # one-sided Lipschitz bound u_x <= 1/t for sigma = 1
    assert fwd.max() <= (1 / t) * (1 + 1e-2)
    assert abs(float(u.mean())) < 1e-12
    assert np.max(np.abs(u)) <= 1.0 + 1e-9
    assert len(sol.shocks) == 1
    xs, ul, ur = sol.shocks[0]
    assert xs == pytest.approx(0.5, abs=1e-10)
    assert ul == pytest.approx(-ur, abs=1e-10)
    assert ul > 0 > ur


def test_solve_pre_shock_matches_characteristics_everywhere():
    u0 = sine_field(512)
    t = 0.5 * shock_time(u0, QUAD)
    sol = solve_inviscid(u0, QUAD, t, 64)
    assert len(sol.shocks) == 0
    for i in range(64):
        a = characteristics_eval(u0, QUAD, t, i / 64)
        assert abs(float(sol.field.samples[i]) - a) < 1e-8


def test_solve_seeded_field_conserves_and_lists_entropic_shocks():
    u0 = seeded_initial(42, 256)
    t = 2.5 * shock_time(u0, QUAD)
    sol = solve_inviscid(u0, QUAD, t, 1024)  # conservation check runs inside
    assert len(sol.shocks) >= 1
    for xs, ul, ur in sol.shocks:
        assert 0.0 <= xs < 1.0
        assert ul > ur + 1e-8  # entropy: u jumps down across a shock
    # one-sided values just off the reported location agree with the
    # single-point oracle, so the bisected position is right
    xs, ul, ur = sol.shocks[0]
    left, _ = lax_oleinik_eval(u0, QUAD, t, xs - 1e-9)
    _, right = lax_oleinik_eval(u0, QUAD, t, xs + 1e-9)
    assert left == pytest.approx(ul, abs=1e-5)
    assert right == pytest.approx(ur, abs=1e-5)
    # grid samples match the single-point oracle up to the projected constant
    k = [17, 301, 512, 770]
    mids = []
    for i in k:
        ul_i, ur_i = lax_oleinik_eval(u0, QUAD, t, i / 1024)
        mids.append(0.5 * (ul_i + ur_i))
    diffs_oracle = np.diff(mids)
    diffs_grid = np.diff(sol.field.samples[k])
    np.testing.assert_allclose(diffs_grid, diffs_oracle, atol=1e-12)


def test_solve_minimizers_monotone():
    u0 = seeded_initial(7, 256)
    t = 2.0 * shock_time(u0, QUAD)
    sol = solve_inviscid(u0, QUAD, t, 256)
    assert np.all(np.diff(sol.y_minus) >= -1e-12)


def test_solve_validation():
    u0 = sine_field(64)
    with pytest.raises(DomainError):
        solve_inviscid(u0, QUAD, 0.0, 64)
    with pytest.raises(DomainError):
        solve_inviscid(u0, QUAD, 0.1, 48)
    with pytest.raises(DomainError):
        solve_inviscid(u0, QUAD, 0.1, 8)
    with pytest.raises(DomainError):
        solve_inviscid(u0, QUAD, 0.1, 1024)  # exceeds the 8 n_grid lattice


def test_shocks_csv(tmp_path):
    u0 = sine_field(1024)
    t = 2 * shock_time(u0, QUAD)
    sol = solve_inviscid(u0, QUAD, t, 256)
    path = tmp_path / "shocks.csv"
    sol.shocks_to_csv(path, header="t=0.318")
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "# t=0.318"
    assert lines[1] == "x_shock,u_left,u_right"
    xs, ul, ur = (float(v) for v in lines[2].split(","))
    assert (xs, ul, ur) == sol.shocks[0]
