"""Exact classical-flux solutions via the Cole-Hopf transformation.

u = -2 nu (log phi)_x turns u_t + u u_x = nu u_xx into the heat equation
phi_t = nu phi_xx, which diagonalizes in Fourier space.  This module is a
test oracle, not a production solver: accuracy degrades once the dynamic
range exp(range(U0)/(2 nu)) grows, so nu is floored at 1e-4.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.fft as _fft

from .errors import DomainError, NumericsError
from .field import PeriodicField, _is_power_of_two

_TWO_PI = 2.0 * np.pi
_NU_FLOOR = 1e-4


@dataclass(frozen=True)
class HeatPotential:
    """Fourier data of phi0 = exp(-(U0 - min U0)/(2 nu)) on an oversampled grid."""

    phi0_coeffs: np.ndarray
    nu: float
    n_grid: int


def heat_potential(u0: PeriodicField, nu: float, n_grid: int) -> HeatPotential:
    """Build the initial heat-equation potential on an oversampled grid."""
    if nu < _NU_FLOOR:
        raise DomainError(f"nu={nu} below the oracle floor {_NU_FLOOR}")
    if not _is_power_of_two(n_grid) or n_grid < u0.n_grid:
        raise DomainError("oversampled grid must be a power of two >= the input grid")
    U0 = u0.antiderivative().resample(n_grid).samples
    expo = -(U0 - U0.min()) / (2.0 * nu)
    if expo.max() > 700.0:
        raise NumericsError(
            f"exp dynamic range {expo.max():.1f} overflows float64; nu too small for this u0"
        )
    phi0 = np.exp(expo)
    if np.any(phi0 <= 0.0):
        raise NumericsError("initial potential is nonpositive on the grid")
    return HeatPotential(phi0_coeffs=_fft.rfft(phi0), nu=nu, n_grid=n_grid)


def _velocity_from_potential(pot: HeatPotential, t: float, n_out: int) -> PeriodicField:
    n = pot.n_grid
    idx = np.arange(n // 2 + 1)
    decay = np.exp(-4.0 * np.pi**2 * idx**2 * pot.nu * t)
    coeffs = pot.phi0_coeffs * decay
    phi = _fft.irfft(coeffs, n)
    if np.any(phi <= 0.0):
        raise NumericsError(
            "heat potential nonpositive on the grid: oversampling is insufficient"
        )
    dcoeffs = coeffs * (1j * _TWO_PI * idx)
    dcoeffs[-1] = 0.0
    phi_x = _fft.irfft(dcoeffs, n)
    u = -2.0 * pot.nu * phi_x / phi
    stride = n // n_out
    return PeriodicField(u[::stride])


def solve_classical(
    u0: PeriodicField, nu: float, t: float, n_out: int, oversample: int = 4
) -> PeriodicField:
    """Exact solution of u_t + (u^2/2)_x = nu u_xx at time t, on n_out points."""
    if t < 0:
        raise DomainError("t must be >= 0")
    if not _is_power_of_two(n_out) or n_out < 16:
        raise DomainError(f"n_out must be a power of two >= 16, got {n_out}")
    if oversample < 1 or oversample & (oversample - 1):
        raise DomainError("oversample must be a power of two >= 1")
    n_os = oversample * max(n_out, u0.n_grid)
    pot = heat_potential(u0, nu, n_os)
    return _velocity_from_potential(pot, t, n_out)
