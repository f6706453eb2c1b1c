"""Zero-mean periodic fields on [0,1) with spectral and grid representations.

Fourier convention: u_hat(n) = integral of u(x) exp(-2 pi i n x) dx, so the
coefficient array is rfft(samples)/n_grid.  All L^p norms use the rectangle
rule on the sample grid, which is spectrally accurate for smooth integrands.
"""
from __future__ import annotations

import struct
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.fft as _fft

from .errors import DomainError, NumericsError, ResolutionWarning

_TWO_PI = 2.0 * np.pi


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class PeriodicField:
    """A real zero-mean field sampled at n_grid equispaced points of [0,1)."""

    samples: np.ndarray
    _coeffs: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=np.float64)
        if s.ndim != 1:
            raise DomainError("samples must be a one-dimensional array")
        n = s.shape[0]
        if not _is_power_of_two(n) or n < 16:
            raise DomainError(f"n_grid must be a power of two >= 16, got {n}")
        if not np.all(np.isfinite(s)):
            raise NumericsError("samples contain NaN or Inf")
        mu = s.mean()
        scale = float(np.max(np.abs(s))) if s.size else 0.0
        # skip when already zero-mean so serialization round-trips bitwise
        if abs(mu) > 1e-14 * max(1.0, scale):
            s = s - mu
        else:
            s = s.copy()
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    @property
    def n_grid(self) -> int:
        return self.samples.shape[0]

    @property
    def x(self) -> np.ndarray:
        n = self.n_grid
        return np.arange(n) / n

    @property
    def coeffs(self) -> np.ndarray:
        """u_hat(n) for n = 0..n_grid/2 (integral convention); conjugates give n < 0."""
        if self._coeffs is None:
            c = _fft.rfft(self.samples) / self.n_grid
            c[0] = 0.0
            c.setflags(write=False)
            object.__setattr__(self, "_coeffs", c)
        return self._coeffs

    def coeff(self, n: int) -> complex:
        """Signed-index coefficient u_hat(n), |n| <= n_grid/2."""
        half = self.n_grid // 2
        if abs(n) > half:
            raise DomainError(f"|n| must be <= {half}, got {n}")
        c = self.coeffs[abs(n)]
        return complex(c) if n >= 0 else complex(np.conj(c))

    def power(self) -> np.ndarray:
        """|u_hat(n)|^2 for n = 0..n_grid/2."""
        return np.abs(self.coeffs) ** 2

    def top_third_fraction(self) -> float:
        p = self.power()
        n = np.arange(p.shape[0])
        # interior modes count twice (+/-n), Nyquist once
        w = np.full(p.shape[0], 2.0)
        w[0] = 1.0
        if self.n_grid % 2 == 0:
            w[-1] = 1.0
        total = float(np.sum(w * p))
        if total == 0.0:
            return 0.0
        hi = float(np.sum((w * p)[n > self.n_grid // 3]))
        return hi / total

    def derivative(self, m: int = 1) -> "PeriodicField":
        """Spectral m-th derivative; warns when the field is not band-resolved."""
        if m < 1:
            raise DomainError("derivative order must be >= 1")
        if self.top_third_fraction() > 1e-6:
            warnings.warn(
                "field is not band-resolved; spectral derivative may be unreliable",
                ResolutionWarning,
                stacklevel=2,
            )
        n = self.n_grid
        c = self.coeffs * (_TWO_PI * 1j * np.arange(n // 2 + 1)) ** m
        if m % 2 == 1:
            c[-1] = 0.0  # Nyquist has no well-defined odd derivative on the grid
        return PeriodicField(_fft.irfft(c * n, n))

    def norm(self, m: int, p: float) -> float:
        """W^{m,p} seminorm |d^m u / dx^m|_{L^p}; p in [1, inf]."""
        if m < 0:
            raise DomainError("m must be >= 0")
        if p != np.inf and p < 1:
            raise DomainError(f"p must be >= 1 or inf, got {p}")
        v = self.samples if m == 0 else self.derivative(m).samples
        if p == np.inf:
            return float(np.max(np.abs(v)))
        if p == 1:
            return float(np.mean(np.abs(v)))
        if p == 2:
            return float(np.sqrt(np.mean(v * v)))
        return float(np.mean(np.abs(v) ** p) ** (1.0 / p))

    def snap_ell(self, ell: float) -> float:
        """Nearest grid-representable separation to ell."""
        s = max(1, int(round(ell * self.n_grid)))
        return s / self.n_grid

    def _shift_steps(self, ell: float) -> int:
        n = self.n_grid
        s = ell * n
        r = round(s)
        if r < 1 or abs(s - r) > 1e-6:
            raise DomainError(
                f"separation {ell} is not a positive multiple of 1/{n}"
            )
        return int(r) % n

    def increments(self, ell: float) -> np.ndarray:
        """u(x+ell) - u(x) on the grid; ell must be a grid multiple."""
        s = self._shift_steps(ell)
        return np.roll(self.samples, -s) - self.samples

    def increment_moment(self, p: float, ell: float) -> float:
        """S_p(ell) = mean of |u(x+ell) - u(x)|^p over the grid."""
        if p <= 0:
            raise DomainError(f"moment order must be positive, got {p}")
        d = np.abs(self.increments(ell))
        if p == 1.0:
            return float(np.mean(d))
        if p == 2.0:
            return float(np.mean(d * d))
        return float(np.mean(d**p))

    def positive_part_increment(self, ell: float) -> float:
        """Mean of (u(x+ell) - u(x))^+ over the grid."""
        d = self.increments(ell)
        return float(np.mean(np.maximum(d, 0.0)))

    def eval_at(self, x) -> np.ndarray:
        """Evaluate the trigonometric interpolant at arbitrary points."""
        x = np.atleast_1d(np.asarray(x, dtype=np.float64))
        c = self.coeffs
        half = self.n_grid // 2
        out = np.zeros_like(x)
        nz = np.nonzero(c[:half])[0]
        if nz.size:
            cnz = c[nz]
            step = max(1, 2_000_000 // nz.size)
            for i in range(0, x.size, step):
                ph = np.exp(2j * np.pi * np.outer(x[i : i + step], nz))
                out[i : i + step] += 2.0 * np.real(ph @ cnz)
        if c[half] != 0:
            out += np.real(c[half]) * np.cos(np.pi * self.n_grid * x)
        return out

    def antiderivative(self) -> "PeriodicField":
        """Zero-mean periodic antiderivative (Nyquist mode dropped)."""
        n = self.n_grid
        idx = np.arange(n // 2 + 1)
        denom = _TWO_PI * 1j * idx
        denom[0] = 1.0
        c = self.coeffs / denom
        c[0] = 0.0
        c[-1] = 0.0
        return PeriodicField(_fft.irfft(c * n, n))

    def resample(self, n_new: int) -> "PeriodicField":
        """Spectral resampling to another power-of-two grid."""
        if not _is_power_of_two(n_new) or n_new < 16:
            raise DomainError(f"n_grid must be a power of two >= 16, got {n_new}")
        n = self.n_grid
        if n_new == n:
            return self
        c = self.coeffs.copy()
        if n_new > n:
            out = np.zeros(n_new // 2 + 1, dtype=np.complex128)
            out[: n // 2 + 1] = c
            out[n // 2] = c[n // 2] / 2.0  # old Nyquist becomes an interior mode
        else:
            out = c[: n_new // 2 + 1].copy()
            out[-1] = out[-1] * 2.0  # interior mode becomes the new Nyquist
            out[-1] = out[-1].real
        return PeriodicField(_fft.irfft(out * n_new, n_new))

    # ------------------------------------------------------------------
    # serialization
    # ------------------------------------------------------------------

    def to_binary(self, path, t: float = 0.0, nu: float = 0.0) -> None:
        """Write header {n_grid, t, nu} plus samples, little-endian float64."""
        with open(path, "wb") as f:
            f.write(_pack_record(self, t, nu))

    def to_csv(self, path, header: str | None = None) -> None:
        with open(path, "w") as f:
            if header:
                f.write(f"# {header}\n")
            f.write("x,u\n")
            for xj, uj in zip(self.x, self.samples):
                f.write(f"{float(xj)!r},{float(uj)!r}\n")


def project_zero_mean(samples) -> PeriodicField:
    """Build a PeriodicField from raw samples, removing the mean."""
    return PeriodicField(np.asarray(samples, dtype=np.float64))


def from_function(fn, n_grid: int) -> PeriodicField:
    """Sample a callable on the n_grid grid and project out the mean."""
    x = np.arange(n_grid) / n_grid
    return project_zero_mean(fn(x))


def _pack_record(field: PeriodicField, t: float, nu: float) -> bytes:
    head = struct.pack("<3d", float(field.n_grid), float(t), float(nu))
    body = field.samples.astype("<f8").tobytes()
    return head + body


def read_binary(path_or_buf):
    """Read one field record; returns (field, t, nu)."""
    if hasattr(path_or_buf, "read"):
        f = path_or_buf
        rec = _read_record(f)
        if rec is None:
            raise DomainError("empty field container")
        return rec
    with open(path_or_buf, "rb") as f:
        rec = _read_record(f)
        if rec is None:
            raise DomainError("empty field container")
        return rec


def _read_record(f):
    head = f.read(24)
    if len(head) == 0:
        return None
    if len(head) != 24:
        raise DomainError("truncated field header")
    n_f, t, nu = struct.unpack("<3d", head)
    n = int(n_f)
    if n_f != n or not _is_power_of_two(n) or n < 16:
        raise DomainError(f"corrupt field header: n_grid={n_f}")
    body = f.read(8 * n)
    if len(body) != 8 * n:
        raise DomainError("truncated field samples")
    samples = np.frombuffer(body, dtype="<f8").astype(np.float64)
    return PeriodicField(samples), t, nu


def read_binary_sequence(path):
    """Read all field records from a container file."""
    out = []
    with open(path, "rb") as f:
        while True:
            rec = _read_record(f)
            if rec is None:
                break
            out.append(rec)
    return out


def write_binary_sequence(path, records) -> None:
    """Write (field, t, nu) records into a single container file."""
    with open(path, "wb") as f:
        for fld, t, nu in records:
            f.write(_pack_record(fld, t, nu))


def sine_field(n_grid: int, amplitude: float = 1.0, mode: int = 1) -> PeriodicField:
    x = np.arange(n_grid) / n_grid
    return PeriodicField(amplitude * np.sin(_TWO_PI * mode * x))


def ramp_field(n_grid: int) -> PeriodicField:
    """Samples of x - 1/2 on [0,1): the prototypical sawtooth.

    The jump point x=0 carries the Fourier midpoint value 0, so the discrete
    mean vanishes identically and the coefficients come out purely imaginary,
    matching the continuum sawtooth mode for mode.
    """
    x = np.arange(n_grid) / n_grid
    u = x - 0.5
    u[0] = 0.0
    return PeriodicField(u)
