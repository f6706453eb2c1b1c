"""Flux families: convexity, slope inversion, Legendre transforms."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from burgulence import ConfigError, DomainError, flux_eval, inverse_slope, legendre, make_flux

FAMILIES = [
    make_flux("quadratic"),
    make_flux("quartic", epsilon=0.05),
    make_flux("quartic", epsilon=0.0),
    make_flux("cosh", u_max=3.0),
]


@pytest.mark.parametrize("m", FAMILIES, ids=lambda m: m.kind)
def test_normalisation(m):
    # f(0) = f'(0) = 0 and f''(0) = 1 for every family
    assert flux_eval(m, 0.0) == 0.0
    assert flux_eval(m, 0.0, order=1) == 0.0
    assert flux_eval(m, 0.0, order=2) == 1.0
    assert m.sigma == 1.0


@pytest.mark.parametrize("m", FAMILIES, ids=lambda m: m.kind)
def test_convexity_on_working_range(m):
    u = np.linspace(-m.u_max, m.u_max, 1001)
    assert np.all(flux_eval(m, u, order=2) >= m.sigma - 1e-12)


def test_quadratic_values():
    m = make_flux("quadratic")
    np.testing.assert_allclose(flux_eval(m, 3.0), 4.5)
    np.testing.assert_allclose(flux_eval(m, -2.0, order=1), -2.0)
    np.testing.assert_allclose(legendre(m, 3.0), 4.5)


def test_quartic_values():
    m = make_flux("quartic", epsilon=0.05)
    np.testing.assert_allclose(flux_eval(m, 2.0), 2.0 + 0.05 * 16)
    np.testing.assert_allclose(flux_eval(m, 2.0, order=1), 2.0 + 0.2 * 8)
    np.testing.assert_allclose(flux_eval(m, 2.0, order=2), 1.0 + 0.6 * 4)


def test_cosh_legendre_closed_form():
    m = make_flux("cosh", u_max=5.0)
    s = np.array([-2.0, -0.3, 0.0, 0.7, 3.1])
    expected = s * np.arcsinh(s) - np.sqrt(1 + s * s) + 1
    np.testing.assert_allclose(legendre(m, s), expected, atol=1e-11)


@pytest.mark.parametrize("m", FAMILIES, ids=lambda m: m.kind)
def test_inverse_slope_residual(m):
    s = np.linspace(-0.9, 0.9, 41) * flux_eval(m, m.u_max, order=1)
    u = inverse_slope(m, s)
    np.testing.assert_allclose(flux_eval(m, u, order=1), s, atol=1e-10)
    assert np.all(np.abs(u) <= m.u_max + 1e-9)


def test_inverse_slope_out_of_range():
    m = make_flux("quartic", epsilon=0.05, u_max=2.0)
    top = flux_eval(m, 2.0, order=1)
    with pytest.raises(DomainError):
        inverse_slope(m, top + 1.0)


@settings(max_examples=60, deadline=None)
@given(
    u=st.floats(-2.0, 2.0),
    s=st.floats(-2.0, 2.0),
    eps=st.floats(0.0, 0.2),
)
def test_young_inequality(u, s, eps):
    # s*u <= f(u) + f*(s), with equality at s = f'(u)
    m = make_flux("quartic", epsilon=eps, u_max=4.0)
    assert s * u <= flux_eval(m, u) + legendre(m, s) + 1e-10


@settings(max_examples=40, deadline=None)
@given(u=st.floats(-2.5, 2.5), eps=st.floats(0.0, 0.2))
def test_young_equality_case(u, eps):
    m = make_flux("quartic", epsilon=eps, u_max=4.0)
    s = flux_eval(m, u, order=1)
    gap = flux_eval(m, u) + legendre(m, s) - s * u
    assert abs(gap) < 1e-9


@settings(max_examples=40, deadline=None)
@given(s=st.floats(-3.0, 3.0))
def test_legendre_convex_nonnegative(s):
    m = make_flux("cosh", u_max=5.0)
    val = legendre(m, s)
    assert val >= -1e-12
    # f*(0) = 0 since f >= 0
    assert legendre(m, 0.0) == pytest.approx(0.0, abs=1e-12)


def test_legendre_linear_continuation_beyond_range():
    # past the attainable slopes the sup sits at the endpoint of the range
    m = make_flux("quartic", epsilon=0.1, u_max=1.0)
    top = flux_eval(m, 1.0, order=1)
    f_top = flux_eval(m, 1.0)
    for s in (top + 0.5, top + 2.0):
        np.testing.assert_allclose(legendre(m, s), s * 1.0 - f_top, rtol=1e-12)


def test_max_speed():
    m = make_flux("quadratic")
    u = np.array([0.3, -1.7, 0.9])
    assert m.max_speed(u) == pytest.approx(1.7)


def test_config_validation():
    with pytest.raises(ConfigError):
        make_flux("cubic")
    with pytest.raises(ConfigError):
        make_flux("quartic", epsilon=-0.1)
    with pytest.raises(ConfigError):
        make_flux("quadratic", u_max=0.0)
    with pytest.raises(DomainError):
        flux_eval(make_flux("quadratic"), 1.0, order=3)
