"""Strongly convex flux families and their Legendre transforms."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DomainError

_KINDS = ("quadratic", "quartic", "cosh")


@dataclass(frozen=True)
class FluxModel:
    """A smooth convex flux f with f(0) = f'(0) = 0 on a working range [-u_max, u_max].

    sigma is the minimum of f'' over the working range; for every built-in
    family the minimum sits at u = 0 and equals 1.
    """

    kind: str
    epsilon: float = 0.0
    u_max: float = 4.0
    sigma: float = 0.0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ConfigError(f"unknown flux family {self.kind!r}; choose from {_KINDS}")
        if self.kind == "quartic" and self.epsilon < 0:
            raise ConfigError("quartic coefficient must be >= 0")
        if self.u_max <= 0:
            raise ConfigError("u_max must be positive")
        # every family has f'' minimized at u = 0 with f''(0) = 1
        object.__setattr__(self, "sigma", float(self(0.0, order=2)))

    def __call__(self, u, order: int = 0):
        return flux_eval(self, u, order)

    def max_speed(self, u) -> float:
        """max |f'(u)| over an array of states."""
        return float(np.max(np.abs(flux_eval(self, u, order=1))))


def make_flux(kind: str, epsilon: float = 0.0, u_max: float = 4.0) -> FluxModel:
    return FluxModel(kind=kind, epsilon=epsilon, u_max=u_max)


def flux_eval(model: FluxModel, u, order: int = 0):
    """f(u), f'(u) or f''(u) elementwise."""
    u = np.asarray(u, dtype=np.float64)
    k, eps = model.kind, model.epsilon
    if order == 0:
        if k == "quadratic":
            out = 0.5 * u * u
        elif k == "quartic":
            out = 0.5 * u * u + eps * u**4
        else:
            out = np.cosh(u) - 1.0
    elif order == 1:
        if k == "quadratic":
            out = u
        elif k == "quartic":
            out = u + 4.0 * eps * u**3
        else:
            out = np.sinh(u)
    elif order == 2:
        if k == "quadratic":
            out = np.ones_like(u)
        elif k == "quartic":
            out = 1.0 + 12.0 * eps * u * u
        else:
            out = np.cosh(u)
    else:
        raise DomainError(f"order must be 0, 1 or 2, got {order}")
    return out if out.ndim else float(out)


def convexity_bound(model: FluxModel) -> float:
    """min of f'' over the working range (attained at u = 0 for all families)."""
    return model.sigma


def inverse_slope(model: FluxModel, s) -> np.ndarray:
    """Solve f'(u) = s for u on the working range, elementwise.

    f' is strictly increasing (f'' >= sigma > 0), so bisection converges
    unconditionally; tolerance 1e-12 in u.
    """
    scalar = np.ndim(s) == 0
    s = np.atleast_1d(np.asarray(s, dtype=np.float64))
    lo_v = flux_eval(model, -model.u_max, order=1)
    hi_v = flux_eval(model, model.u_max, order=1)
    if np.any(s < lo_v - 1e-12) or np.any(s > hi_v + 1e-12):
        raise DomainError(
            f"slope outside attainable range [{lo_v:.6g}, {hi_v:.6g}] of f' on the working range"
        )
    if model.kind == "quadratic":
        u = np.clip(s, lo_v, hi_v)
    elif model.kind == "cosh":
        u = np.arcsinh(np.clip(s, lo_v, hi_v))
    else:
        lo = np.full_like(s, -model.u_max)
        hi = np.full_like(s, model.u_max)
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            take_hi = flux_eval(model, mid, order=1) < s
            lo = np.where(take_hi, mid, lo)
            hi = np.where(take_hi, hi, mid)
        u = 0.5 * (lo + hi)
    return float(u[0]) if scalar else u


def legendre(model: FluxModel, s) -> np.ndarray:
    """Legendre transform f*(s) = sup_u (s u - f(u)) over the working range.

    For s inside the range of f' the supremum is attained where f'(u) = s;
    outside, the supremum sits at the range endpoint (f* continues linearly).
    """
    scalar = np.ndim(s) == 0
    s = np.atleast_1d(np.asarray(s, dtype=np.float64))
    if model.kind == "quadratic":
        out = 0.5 * s * s
    else:
        lo_v = flux_eval(model, -model.u_max, order=1)
        hi_v = flux_eval(model, model.u_max, order=1)
        sc = np.clip(s, lo_v, hi_v)
        u = np.asarray(inverse_slope(model, sc))
        out = s * u - np.asarray(flux_eval(model, u, order=0))
    return float(out[0]) if scalar else out
