"""Windowed diagnostics for decaying runs.

Everything here is a pure function over a finished trajectory. The averaging
window [T1, T2] is computed from the initial condition alone (through the
quantity D) plus one measured constant, and all bracketed quantities
{A} = (T2-T1)^-1 * integral of A over [T1, T2] are trapezoid sums over the
stored snapshots. Structure functions, spectra, flatness, amplitude and slope
audits, and cliff-occupancy classification all live on top of that average.
"""

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    ConfigError,
    CoverageError,
    DomainError,
    FlatnessError,
    NumericsError,
)
from .field import PeriodicField
from .solver import Trajectory, config_hash

# snapshot spacing inside the window may not exceed (T2-T1)/COVERAGE_DENSITY
COVERAGE_DENSITY = 64


@dataclass(frozen=True)
class WindowSpec:
    """Averaging window [T1, T2] with the constants that produced it."""

    D: float
    sigma: float
    C_tilde: float
    T1: float
    T2: float

    def __post_init__(self):
        if not self.D > 1:
            raise DomainError(f"D must exceed 1, got {self.D}")
        if not self.sigma > 0 or not self.C_tilde > 0:
            raise DomainError("sigma and C_tilde must be positive")
        # the window is a formula, not a free choice; keep it bit-exact
        if self.T1 != _t1_formula(self.D, self.C_tilde):
            raise DomainError("T1 does not match 0.25 / (D^2 C_tilde)")
        if self.T2 != max(1.5 * self.T1, 2.0 * self.D / self.sigma):
            raise DomainError("T2 does not match max(1.5 T1, 2 D / sigma)")

    @property
    def span(self) -> float:
        return self.T2 - self.T1


def _t1_formula(D: float, C_tilde: float) -> float:
    return 0.25 / (D * D * C_tilde)


def averaging_window(D: float, sigma: float, C_tilde: float) -> WindowSpec:
    """Window constants T1 = 1/(4 D^2 C_tilde), T2 = max(1.5 T1, 2 D / sigma)."""
    if not D > 1:
        raise DomainError(f"D must exceed 1, got {D}")
    if sigma <= 0:
        raise DomainError(f"sigma must be positive, got {sigma}")
    if C_tilde <= 0:
        raise DomainError(f"C_tilde must be positive, got {C_tilde}")
    T1 = _t1_formula(D, C_tilde)
    T2 = max(1.5 * T1, 2.0 * D / sigma)
    return WindowSpec(D=D, sigma=sigma, C_tilde=C_tilde, T1=T1, T2=T2)


@dataclass(frozen=True)
class RangeSpec:
    """Scale ranges: dissipation (0, C1 nu], inertial (C1 nu, C2], energy (C2, 1]."""

    K: float
    nu0: float
    C1: float
    C2: float

    def __post_init__(self):
        if not self.K > 1:
            raise ConfigError(f"K must exceed 1, got {self.K}")
        if min(self.nu0, self.C1, self.C2) <= 0:
            raise ConfigError("nu0, C1, C2 must be positive")
        if self.C2 >= 1:
            raise ConfigError("C2 must lie below 1 so the energy range is non-empty")
        if self.C1 > self.K**-2 / 4 * (1 + 1e-12):
            raise ConfigError(f"C1={self.C1} exceeds K^-2/4={self.K ** -2 / 4}")
        ratio = self.C1 / self.C2
        if ratio < 5 * self.K**2 * (1 - 1e-12):
            raise ConfigError(f"C1/C2={ratio} is below 5 K^2={5 * self.K ** 2}")
        if ratio >= 1.0 / self.nu0:
            raise ConfigError(f"C1/C2={ratio} must stay below 1/nu0={1 / self.nu0}")

    @classmethod
    def from_K(cls, K: float) -> "RangeSpec":
        return cls(K=K, nu0=K**-2 / 6, C1=K**-2 / 4, C2=K**-4 / 20)

    def admissible(self, nu: float) -> bool:
        return 0 < nu <= self.nu0

    def j1(self, nu: float):
        self._check_nu(nu)
        return (0.0, self.C1 * nu)

    def j2(self, nu: float):
        self._check_nu(nu)
        return (self.C1 * nu, self.C2)

    def j3(self, nu: float):
        self._check_nu(nu)
        return (self.C2, 1.0)

    def _check_nu(self, nu: float) -> None:
        if not self.admissible(nu):
            raise DomainError(f"nu={nu} is not admitted (nu0={self.nu0})")


def quantity_D(u0: PeriodicField) -> float:
    """max(1/|u0|_1, |u0|_{1,inf}): the one number controlling all constants."""
    l1 = u0.norm(0, 1)
    if l1 == 0.0:
        raise DomainError("zero initial condition is the excluded trivial case")
    D = max(1.0 / l1, u0.norm(1, np.inf))
    # sandwich D^-1 <= |u0|_{m,p} <= D at the four corners of 0<=m<=1, 1<=p<=inf
    for m, p in ((0, 1), (0, np.inf), (1, 1), (1, np.inf)):
        v = u0.norm(m, p)
        if not (1.0 / D) * (1 - 1e-9) <= v <= D * (1 + 1e-9):
            raise NumericsError(
                f"|u0|_({m},{p})={v} escapes the sandwich [1/D, D] with D={D}"
            )
    return D


def estimate_C_tilde(traj: Trajectory) -> float:
    """Operational window constant: 1.5 * sup over the run of nu * ||u||_1^2."""
    return 1.5 * traj.config.nu * float(np.max(traj.stats.enstrophy))


def run_window(traj: Trajectory) -> WindowSpec:
    """Window for a finished run: D from its initial data, C_tilde measured."""
    D = quantity_D(traj.config.u0)
    return averaging_window(D, traj.config.flux.sigma, estimate_C_tilde(traj))


def window_series(ts: np.ndarray, fields: list, window: WindowSpec):
    """Nodes of a sampled time series straddling [T1, T2], coverage-checked.

    Returns the clipped (times, fields) pair. The nodes must bracket the
    window, and no segment touching it may be longer than the span divided
    by COVERAGE_DENSITY: the quadrature commitment behind every bracket.
    """
    ts = np.asarray(ts, dtype=float)
    T1, T2 = window.T1, window.T2
    slack = 1e-9 * window.span
    if ts[0] > T1 + slack or ts[-1] < T2 - slack:
        raise CoverageError(
            f"snapshots span [{ts[0]}, {ts[-1]}], window needs [{T1}, {T2}]"
        )
    lo = int(np.searchsorted(ts, T1, side="right")) - 1
    hi = int(np.searchsorted(ts, T2, side="left"))
    lo = max(lo, 0)
    hi = min(hi, ts.size - 1)
    limit = window.span / COVERAGE_DENSITY
    seg = np.diff(ts[lo : hi + 1])
    if seg.size and float(np.max(seg)) > limit * (1 + 1e-9):
        raise CoverageError(
            f"snapshot spacing {np.max(seg):.6g} exceeds (T2-T1)/{COVERAGE_DENSITY}"
        )
    return ts[lo : hi + 1], list(fields[lo : hi + 1])


def _window_nodes(traj: Trajectory, window: WindowSpec):
    return window_series(traj.times, [f for _, f in traj.snapshots], window)


def _window_weights(ts: np.ndarray, window: WindowSpec) -> np.ndarray:
    """Node weights of the clipped trapezoid integral over [T1, T2].

    The integral of the piecewise-linear interpolant over the window is linear
    in the node values, so it is a fixed dot product; computing the weights
    once lets whole tables share one pass.
    """
    T1, T2 = window.T1, window.T2
    w = np.zeros(ts.size)
    for i in range(ts.size - 1):
        ta, tb = float(ts[i]), float(ts[i + 1])
        if tb <= ta:
            continue
        a, b = max(ta, T1), min(tb, T2)
        if b <= a:
            continue
        lam_a = (a - ta) / (tb - ta)
        lam_b = (b - ta) / (tb - ta)
        w[i] += 0.5 * (b - a) * (2.0 - lam_a - lam_b)
        w[i + 1] += 0.5 * (b - a) * (lam_a + lam_b)
    return w


def window_mean(ts: np.ndarray, values: np.ndarray, window: WindowSpec):
    """Integral mean over [T1, T2] of the piecewise-linear interpolant.

    values may be one series (shape (T,)) or a stack of them (shape (T, N)).
    """
    values = np.asarray(values)
    if ts.size == 1:
        out = values[0]
        return float(out) if values.ndim == 1 else out
    out = _window_weights(ts, window) @ values / window.span
    return float(out) if values.ndim == 1 else out


_window_mean = window_mean


def _resolve_functional(functional):
    if callable(functional):
        return functional
    if functional == "energy":
        return lambda f: f.norm(0, 2) ** 2
    if isinstance(functional, (tuple, list)) and len(functional) == 3 and functional[0] == "norm":
        _, m, p = functional
        return lambda f: f.norm(m, p)
    raise ConfigError(f"unknown functional {functional!r}")


def time_average(traj: Trajectory, window: WindowSpec, functional, alpha: float = 1.0) -> float:
    """Bracketed average ((T2-T1)^-1 * integral of A^alpha)^(1/alpha)."""
    if alpha <= 0:
        raise DomainError(f"alpha must be positive, got {alpha}")
    fn = _resolve_functional(functional)
    ts, fields = _window_nodes(traj, window)
    vals = np.array([float(fn(f)) ** alpha for f in fields])
    return _window_mean(ts, vals, window) ** (1.0 / alpha)


def structure_function(traj: Trajectory, window: WindowSpec, p: float, ell: float) -> float:
    """{S_p(ell)}: time-averaged p-th absolute increment moment at separation ell."""
    if p < 0:
        raise DomainError(f"moment order must be nonnegative, got {p}")
    if p == 0:
        return 1.0
    return time_average(traj, window, lambda f: f.increment_moment(p, ell), 1.0)


def positive_increment_average(traj: Trajectory, window: WindowSpec, ell: float) -> float:
    """{integral of (u(x+ell) - u(x))^+}; equals S_1/2 for zero-mean fields."""
    return time_average(traj, window, lambda f: f.positive_part_increment(ell), 1.0)


def flatness(traj: Trajectory, window: WindowSpec, ell: float) -> float:
    """F(ell) = S_4(ell) / S_2(ell)^2."""
    s2 = structure_function(traj, window, 2.0, ell)
    if s2 == 0.0:
        raise FlatnessError(f"S_2({ell}) vanishes; flatness undefined")
    s4 = structure_function(traj, window, 4.0, ell)
    return s4 / s2**2


def _band(k: int, M: float, n_grid: int) -> np.ndarray:
    if k < 1 or int(k) != k:
        raise DomainError(f"k must be a positive integer, got {k}")
    if M < 1:
        raise DomainError(f"M must be >= 1, got {M}")
    if M * k > n_grid / 3:
        raise DomainError(f"band [k/M, Mk] with k={k}, M={M} leaves the dealiased range")
    lo = math.ceil(k / M - 1e-9)
    hi = math.floor(M * k + 1e-9)
    band = np.arange(max(lo, 1), hi + 1)
    if band.size == 0:
        raise DomainError(f"band [k/M, Mk] is empty for k={k}, M={M}")
    return band


def energy_spectrum(traj: Trajectory, window: WindowSpec, k: int, M: float = 2.0) -> float:
    """Layer-averaged spectrum {sum over |n| in [k/M, Mk] of |u_hat(n)|^2 / count}."""
    n_grid = traj.config.n_grid
    band = _band(k, M, n_grid)
    count = 2 * band.size  # signed modes: +/-n

    def layer(f: PeriodicField) -> float:
        p = f.power()
        return 2.0 * float(np.sum(p[band])) / count

    return time_average(traj, window, layer, 1.0)


def spectrum_upper_audit(traj: Trajectory, window: WindowSpec) -> float:
    """max over n of {|u_hat(n)|^2} (2 pi n)^2 / {|u|_{1,1}^2}; must stay <= 1."""
    ts, fields = _window_nodes(traj, window)
    power = np.stack([f.power() for f in fields])
    tv2 = np.array([f.norm(1, 1) ** 2 for f in fields])
    denom = _window_mean(ts, tv2, window)
    if denom == 0.0:
        return 0.0
    n_grid = traj.config.n_grid
    ns = np.arange(1, n_grid // 2 + 1)
    avg_power = _window_mean(ts, power[:, ns], window)
    ratios = avg_power * (2.0 * np.pi * ns) ** 2 / denom
    return float(np.max(ratios))


@dataclass(frozen=True)
class SnapshotClass:
    """Occupancy flags for one snapshot at one (nu, K)."""

    condi: bool
    condii: bool
    condiii: bool
    condiibis: bool
    u_inf: float
    max_ux: float
    min_ux: float
    max_abs_ux: float
    max_abs_uxx: float

    @property
    def in_L_K(self) -> bool:
        return self.condi and self.condii and self.condiii

    @property
    def in_O_K(self) -> bool:
        return self.condi and self.condiibis and self.condiii


def classify_snapshot(field: PeriodicField, nu: float, K: float) -> SnapshotClass:
    """Evaluate the cliff-occupancy conditions on grid norms."""
    if nu <= 0:
        raise DomainError(f"nu must be positive, got {nu}")
    if K <= 1:
        raise DomainError(f"K must exceed 1, got {K}")
    u = field.samples
    ux = field.derivative(1).samples
    uxx = field.derivative(2).samples
    u_inf = float(np.max(np.abs(u)))
    max_ux = float(np.max(ux))
    min_ux = float(np.min(ux))
    max_abs_ux = float(np.max(np.abs(ux)))
    max_abs_uxx = float(np.max(np.abs(uxx)))
    condi = (1.0 / K <= u_inf) and (u_inf <= max_ux) and (max_ux <= K)
    condii = 1.0 / (K * nu) <= max_abs_ux <= K / nu
    condiii = max_abs_uxx <= K / nu**2
    condiibis = 1.0 / (K * nu) <= -min_ux <= K / nu
    return SnapshotClass(
        condi=condi,
        condii=condii,
        condiii=condiii,
        condiibis=condiibis,
        u_inf=u_inf,
        max_ux=max_ux,
        min_ux=min_ux,
        max_abs_ux=max_abs_ux,
        max_abs_uxx=max_abs_uxx,
    )


def cliff_profile(n_grid: int, nu: float, amplitude: float = 1.0) -> PeriodicField:
    """Ramp of slope ~amplitude with one smooth cliff of slope -amplitude/(2 nu).

    A caricature of a decayed shock: the sawtooth amplitude*(x - 1/2) with its
    jump replaced by a tanh layer of thickness amplitude*nu.
    """
    if nu <= 0:
        raise DomainError("nu must be positive")
    delta = amplitude * nu
    x = np.arange(n_grid) / n_grid
    y = x - 0.5
    u = amplitude * (y - 0.5 * np.tanh(y / delta) / math.tanh(0.5 / delta))
    return PeriodicField(u)


def lk_fraction(traj: Trajectory, window: WindowSpec, K: float, nu: float | None = None):
    """Fractions of window snapshots lying in L_K and in O_K."""
    if nu is None:
        nu = traj.config.nu
    ts, fields = _window_nodes(traj, window)
    flags = [classify_snapshot(f, nu, K) for f in fields]
    frac_l = sum(c.in_L_K for c in flags) / len(flags)
    frac_o = sum(c.in_O_K for c in flags) / len(flags)
    return frac_l, frac_o


def calibrate_K(traj: Trajectory, window: WindowSpec, floor: float = 0.1,
                grid=(2.0, 4.0, 8.0, 16.0, 32.0)) -> float:
    """Smallest K in the grid whose O_K occupancy reaches the floor (else the largest)."""
    for K in grid:
        _, frac_o = lk_fraction(traj, window, K)
        if frac_o >= floor:
            return K
    return grid[-1]


def _bound_violation(value: float, bound: float) -> float:
    return max(0.0, value - bound) / bound


def oleinik_audit(traj: Trajectory, D: float, sigma: float) -> float:
    """Worst relative breach of max u_x <= min(D, 1/(sigma t)) over t > 0 snapshots."""
    worst = 0.0
    for t, f in traj.snapshots:
        if t <= 0.0:
            continue
        bound = min(D, 1.0 / (sigma * t))
        worst = max(worst, _bound_violation(float(np.max(f.derivative(1).samples)), bound))
    return worst


def amplitude_audit(traj: Trajectory, D: float, sigma: float) -> float:
    """Worst relative breach of |u|_inf <= min(D, 1/(sigma t))."""
    worst = 0.0
    for t, f in traj.snapshots:
        if t <= 0.0:
            continue
        bound = min(D, 1.0 / (sigma * t))
        worst = max(worst, _bound_violation(f.norm(0, np.inf), bound))
    return worst


def tv_audit(traj: Trajectory, D: float, sigma: float) -> float:
    """Worst relative breach of |u|_{1,1} <= 2 min(D, 1/(sigma t))."""
    worst = 0.0
    for t, f in traj.snapshots:
        if t <= 0.0:
            continue
        bound = 2.0 * min(D, 1.0 / (sigma * t))
        worst = max(worst, _bound_violation(f.norm(1, 1), bound))
    return worst


def _half_octave(cap: int) -> list:
    """Deduplicated integers round(2^(i/2)) up to cap."""
    if cap < 1:
        return []
    top = 2 * int(math.log2(cap)) + 3
    vals = sorted({int(round(2 ** (i / 2.0))) for i in range(top)})
    return [v for v in vals if 1 <= v <= cap]


def default_ell_grid(n_grid: int, cap: float = 0.25) -> np.ndarray:
    """Half-octave lattice separations j/n_grid, j >= 1, ell <= cap."""
    js = _half_octave(max(1, int(cap * n_grid)))
    return np.array(js, dtype=int) / n_grid


def default_k_grid(n_grid: int, M: float) -> np.ndarray:
    """Half-octave integer wavenumbers with M k inside the dealiased band."""
    return np.array(_half_octave(int(n_grid / (3 * M))), dtype=int)


@dataclass
class DiagnosticsReport:
    """All windowed tables for one run, plus the audit scalars."""

    nu: float
    n_grid: int
    config_hash: str
    window: WindowSpec
    ranges: RangeSpec
    norm_table: list  # rows (m, p, alpha, value)
    sp_table: list  # rows (p, ell, value)
    spectrum_table: list  # rows (k, M, value)
    flatness_table: list  # rows (ell, value)
    lk: tuple  # (fraction in L_K, fraction in O_K)
    K_used: float
    audit: dict  # name -> worst relative violation

    def __post_init__(self):
        for m, p, a, v in self.norm_table:
            if not (np.isfinite(v) and v >= 0):
                raise NumericsError(f"norm cell ({m},{p},{a}) = {v} is invalid")
        for p, ell, v in self.sp_table:
            if not (np.isfinite(v) and v >= 0):
                raise NumericsError(f"S_{p}({ell}) = {v} is not a nonnegative number")
        for k, M, v in self.spectrum_table:
            if not (np.isfinite(v) and v >= 0):
                raise NumericsError(f"E({k}) = {v} is not a nonnegative number")
        for ell, v in self.flatness_table:
            if not (np.isfinite(v) and v >= 1.0 - 1e-9):
                raise NumericsError(f"F({ell}) = {v} violates F >= 1")

    def norm_value(self, m, p, alpha) -> float:
        for mm, pp, aa, v in self.norm_table:
            if mm == m and pp == p and aa == alpha:
                return v
        raise KeyError((m, p, alpha))

    def sp_value(self, p, ell, rtol: float = 1e-9) -> float:
        for pp, ll, v in self.sp_table:
            if pp == p and abs(ll - ell) <= rtol * max(1.0, abs(ell)):
                return v
        raise KeyError((p, ell))

    def to_json(self, path, header: str | None = None) -> None:
        blob = {
            "header": header,
            "nu": self.nu,
            "n_grid": self.n_grid,
            "config_hash": self.config_hash,
            "window": {
                "D": self.window.D,
                "sigma": self.window.sigma,
                "C_tilde": self.window.C_tilde,
                "T1": self.window.T1,
                "T2": self.window.T2,
            },
            "ranges": {
                "K": self.ranges.K,
                "nu0": self.ranges.nu0,
                "C1": self.ranges.C1,
                "C2": self.ranges.C2,
            },
            "K_used": self.K_used,
            "norm_table": [[m, _json_p(p), a, v] for m, p, a, v in self.norm_table],
            "sp_table": [list(r) for r in self.sp_table],
            "spectrum_table": [list(r) for r in self.spectrum_table],
            "flatness_table": [list(r) for r in self.flatness_table],
            "lk_fraction": list(self.lk),
            "audit": self.audit,
        }
        with open(path, "w") as f:
            json.dump(blob, f, indent=1, sort_keys=True)
            f.write("\n")


def _json_p(p) -> float | str:
    return "inf" if p == np.inf else float(p)


def _fmt_p(p) -> str:
    return "inf" if p == np.inf else f"{float(p):g}"


def report_to_files(report: DiagnosticsReport, outdir, header: str | None = None) -> None:
    """Emit report.json plus the flat CSV tables into outdir."""
    from pathlib import Path

    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    head = f"# {header}\n" if header else ""
    report.to_json(out / "report.json", header=header)
    with open(out / "norms.csv", "w") as f:
        f.write(head + "m,p,alpha,value\n")
        for m, p, a, v in report.norm_table:
            f.write(f"{m},{_fmt_p(p)},{a:g},{float(v)!r}\n")
    with open(out / "sp.csv", "w") as f:
        f.write(head + "p,ell,value\n")
        for p, ell, v in report.sp_table:
            f.write(f"{_fmt_p(p)},{float(ell)!r},{float(v)!r}\n")
    with open(out / "spectrum.csv", "w") as f:
        f.write(head + "k,M,value\n")
        for k, M, v in report.spectrum_table:
            f.write(f"{int(k)},{M:g},{float(v)!r}\n")
    with open(out / "flatness.csv", "w") as f:
        f.write(head + "ell,value\n")
        for ell, v in report.flatness_table:
            f.write(f"{float(ell)!r},{float(v)!r}\n")
    with open(out / "audit.csv", "w") as f:
        f.write(head + "name,value\n")
        for name in sorted(report.audit):
            f.write(f"{name},{float(report.audit[name])!r}\n")


DEFAULT_NORM_GRID = tuple(
    (m, p) for m in (0, 1, 2) for p in (1.0, 2.0, np.inf)
)


def diagnose(
    traj: Trajectory,
    K: float = 10.0,
    ranges: RangeSpec | None = None,
    p_list=(0.5, 1.0, 2.0, 3.0, 4.0),
    ell_list=None,
    k_list=None,
    M: float = 2.0,
    alphas=(1.0, 2.0),
    norm_grid=DEFAULT_NORM_GRID,
) -> DiagnosticsReport:
    """Build the full windowed report for one run."""
    cfg = traj.config
    D = quantity_D(cfg.u0)
    window = averaging_window(D, cfg.flux.sigma, estimate_C_tilde(traj))
    ranges = ranges if ranges is not None else RangeSpec.from_K(K)
    ts, fields = _window_nodes(traj, window)

    norm_table = []
    for m, p in norm_grid:
        vals = np.array([f.norm(m, p) for f in fields])
        for a in alphas:
            norm_table.append(
                (m, p, a, _window_mean(ts, vals**a, window) ** (1.0 / a))
            )

    if ell_list is None:
        ell_list = default_ell_grid(cfg.n_grid)
    sp = {}
    sp_table = []
    for p in sorted(set(list(p_list) + [2.0, 4.0])):
        for ell in ell_list:
            vals = np.array([f.increment_moment(p, ell) for f in fields])
            sp[(p, ell)] = _window_mean(ts, vals, window)
            if p in p_list:
                sp_table.append((p, float(ell), sp[(p, ell)]))

    flat_table = []
    for ell in ell_list:
        s2 = sp[(2.0, ell)]
        if s2 > 0.0:
            flat_table.append((float(ell), sp[(4.0, ell)] / s2**2))

    if k_list is None:
        k_list = default_k_grid(cfg.n_grid, M)
    power = np.stack([f.power() for f in fields])
    spectrum_table = []
    for k in k_list:
        band = _band(int(k), M, cfg.n_grid)
        layer = 2.0 * power[:, band].sum(axis=1) / (2 * band.size)
        spectrum_table.append((int(k), M, _window_mean(ts, layer, window)))

    tv2 = np.array([f.norm(1, 1) ** 2 for f in fields])
    denom = _window_mean(ts, tv2, window)
    if denom == 0.0:
        spec_upper = 0.0
    else:
        ns = np.arange(1, cfg.n_grid // 2 + 1)
        avg_p = np.array([_window_mean(ts, power[:, n], window) for n in ns])
        spec_upper = float(np.max(avg_p * (2.0 * np.pi * ns) ** 2 / denom))

    audit = {
        "oleinik": oleinik_audit(traj, D, cfg.flux.sigma),
        "amplitude": amplitude_audit(traj, D, cfg.flux.sigma),
        "tv": tv_audit(traj, D, cfg.flux.sigma),
        "spectrum_upper": spec_upper,
    }

    return DiagnosticsReport(
        nu=cfg.nu,
        n_grid=cfg.n_grid,
        config_hash=config_hash(cfg),
        window=window,
        ranges=ranges,
        norm_table=norm_table,
        sp_table=sp_table,
        spectrum_table=spectrum_table,
        flatness_table=flat_table,
        lk=lk_fraction(traj, window, K),
        K_used=K,
        audit=audit,
    )
