"""Pseudo-spectral viscous solver on the unit circle.

Diffusion is integrated exactly by a spectral integrating factor, so the time
step is limited only by convection.  The nonlinear term -(f(u))_x is advanced
with Kutta's third-order Runge-Kutta arranged so every exponential factor in
the update decays (no amplification of FFT rounding noise).  The 2/3 rule
dealiases the flux product each stage.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field as dc_field

import numpy as np
import scipy.fft as _fft

from .errors import ConfigError, DomainError, InstabilityError, NumericsError
from .field import PeriodicField, _is_power_of_two
from .flux import FluxModel, flux_eval

_TWO_PI = 2.0 * np.pi


def resolution_floor(nu: float) -> int:
    """Smallest admissible grid for viscosity nu.

    Shock interiors have width ~ nu and need ~16 points across, so the floor
    is the smallest power of two >= 16/nu (never below 16).
    """
    if nu <= 0:
        raise ConfigError(f"viscosity must be positive, got {nu}")
    n = 16.0 / nu
    p = max(4, math.ceil(math.log2(n)))
    # guard against log2 landing a hair above an exact power
    if 2.0 ** (p - 1) >= n:
        p -= 1
    return max(16, 2**p)


@dataclass(frozen=True)
class RunConfig:
    """Everything needed to reproduce one viscous integration."""

    nu: float
    flux: FluxModel
    u0: PeriodicField
    n_grid: int
    t_end: float
    snapshot_times: np.ndarray
    cfl_safety: float = 0.4
    dealias_fraction: float = 2.0 / 3.0

    def __post_init__(self):
        if self.nu <= 0:
            raise ConfigError(f"viscosity must be positive, got {self.nu}")
        if not _is_power_of_two(self.n_grid) or self.n_grid < 16:
            raise ConfigError(f"n_grid must be a power of two >= 16, got {self.n_grid}")
        if self.n_grid < resolution_floor(self.nu):
            raise ConfigError(
                f"n_grid={self.n_grid} is below the resolution floor "
                f"{resolution_floor(self.nu)} for nu={self.nu}"
            )
        if self.u0.n_grid != self.n_grid:
            raise ConfigError(
                f"u0 lives on a {self.u0.n_grid}-point grid, config says {self.n_grid}"
            )
        if self.t_end < 0:
            raise ConfigError("t_end must be >= 0")
        if not 0 < self.cfl_safety <= 1:
            raise ConfigError("cfl_safety must lie in (0, 1]")
        if not 0 < self.dealias_fraction <= 1:
            raise ConfigError("dealias_fraction must lie in (0, 1]")
        st = np.atleast_1d(np.asarray(self.snapshot_times, dtype=np.float64))
        if st.size == 0:
            raise ConfigError("snapshot_times must not be empty")
        if np.any(np.diff(st) <= 0):
            raise ConfigError("snapshot_times must be strictly increasing")
        if st[0] < 0 or st[-1] > self.t_end + 1e-12:
            raise ConfigError("snapshot_times must lie in [0, t_end]")
        st.setflags(write=False)
        object.__setattr__(self, "snapshot_times", st)

    def canonical_dict(self) -> dict:
        u0_bytes = self.u0.samples.astype("<f8").tobytes()
        return {
            "nu": self.nu,
            "flux": {
                "kind": self.flux.kind,
                "epsilon": self.flux.epsilon,
                "u_max": self.flux.u_max,
            },
            "u0_sha256": hashlib.sha256(u0_bytes).hexdigest(),
            "u0_n_grid": self.u0.n_grid,
            "n_grid": self.n_grid,
            "t_end": self.t_end,
            "snapshot_times": [float(t) for t in self.snapshot_times],
            "cfl_safety": self.cfl_safety,
            "dealias_fraction": self.dealias_fraction,
        }


def config_hash(config: RunConfig) -> str:
    blob = json.dumps(config.canonical_dict(), sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


@dataclass(frozen=True)
class StepStats:
    """Per-step records; the last row is the final state with dt = 0."""

    step: np.ndarray
    t: np.ndarray
    dt: np.ndarray
    energy: np.ndarray
    enstrophy: np.ndarray
    maxslope: np.ndarray

    def __len__(self):
        return self.step.shape[0]

    def to_csv(self, path, header: str | None = None) -> None:
        with open(path, "w") as f:
            if header:
                f.write(f"# {header}\n")
            f.write("step,t,dt,energy,enstrophy,maxslope\n")
            for i in range(len(self)):
                f.write(
                    f"{int(self.step[i])},{float(self.t[i])!r},{float(self.dt[i])!r},"
                    f"{float(self.energy[i])!r},{float(self.enstrophy[i])!r},"
                    f"{float(self.maxslope[i])!r}\n"
                )

    @staticmethod
    def from_csv(path) -> "StepStats":
        rows = []
        with open(path) as f:
            for line in f:
                line = line.strip()
                if not line or line.startswith("#") or line[0].isalpha():
                    continue
                rows.append([float(v) for v in line.split(",")])
        arr = np.asarray(rows, dtype=np.float64).reshape(-1, 6)
        return StepStats(
            step=arr[:, 0].astype(int),
            t=arr[:, 1],
            dt=arr[:, 2],
            energy=arr[:, 3],
            enstrophy=arr[:, 4],
            maxslope=arr[:, 5],
        )


@dataclass(frozen=True)
class Trajectory:
    config: RunConfig
    snapshots: list  # of (t, PeriodicField)
    stats: StepStats

    def snapshot_at(self, t: float) -> PeriodicField:
        for ts, f in self.snapshots:
            if abs(ts - t) < 1e-10:
                return f
        raise DomainError(f"no snapshot at t={t}")

    @property
    def times(self) -> np.ndarray:
        return np.array([t for t, _ in self.snapshots])

    @property
    def final(self) -> PeriodicField:
        return self.snapshots[-1][1]


def stable_dt(state: PeriodicField, config: RunConfig) -> float:
    """Convection-limited step: cfl * dx / max|f'(u)| (dx when the field is zero)."""
    dx = 1.0 / config.n_grid
    speed = config.flux.max_speed(state.samples)
    if speed == 0.0:
        return dx
    return config.cfl_safety * dx / speed


def _quantize_dt(dt: float) -> float:
    """Largest dt' <= dt of the form 2^e * (1 + j/16), to reuse exponentials."""
    e = math.floor(math.log2(dt))
    m = dt / 2.0**e
    j = math.floor((m - 1.0) * 16.0)
    q = 2.0**e * (1.0 + j / 16.0)
    if q > dt:  # rounding right at a quantization boundary
        q = 2.0**e * (1.0 + (j - 1) / 16.0)
    return q


class _Kernel:
    """Spectral state plus precomputed masks and exponential caches."""

    def __init__(self, config: RunConfig):
        n = config.n_grid
        self.n = n
        self.flux = config.flux
        idx = np.arange(n // 2 + 1)
        keep_max = int(config.dealias_fraction * (n // 2) + 1e-9)
        self.mask = idx <= keep_max
        self.kfac = np.where(self.mask, -1j * _TWO_PI * idx, 0.0)
        self.L = -config.nu * (_TWO_PI * idx) ** 2
        w = np.full(n // 2 + 1, 2.0)
        w[0] = 1.0
        w[-1] = 1.0
        self.w_energy = w
        self.w_enstrophy = w * (_TWO_PI * idx) ** 2
        self._exp_cache: dict[float, tuple[np.ndarray, np.ndarray]] = {}

    def load(self, u: PeriodicField) -> np.ndarray:
        U = _fft.rfft(u.samples)
        U[~self.mask] = 0.0
        U[0] = 0.0
        return U

    def physical(self, U: np.ndarray) -> np.ndarray:
        return _fft.irfft(U, self.n)

    def nonlinear(self, U: np.ndarray) -> np.ndarray:
        w = flux_eval(self.flux, self.physical(U))
        return self.kfac * _fft.rfft(w)

    def exps(self, dt: float):
        pair = self._exp_cache.get(dt)
        if pair is None:
            Eh = np.exp(self.L * (0.5 * dt))
            pair = (Eh, Eh * Eh)
            if len(self._exp_cache) < 4096:
                self._exp_cache[dt] = pair
        return pair

    def step(self, U: np.ndarray, dt: float, u_phys: np.ndarray | None = None):
        """One integrating-factor RK4 step (abscissae 0, 1/2, 1/2, 1).

        Arranged so every exponential factor decays; amplifying factors would
        blow FFT rounding noise back up through the dissipative range.
        """
        if u_phys is None:
            u_phys = self.physical(U)
        Eh, E1 = self.exps(dt)
        k1 = self.kfac * _fft.rfft(flux_eval(self.flux, u_phys))
        EhU = Eh * U
        k2 = self.nonlinear(EhU + (0.5 * dt) * (Eh * k1))
        k3 = self.nonlinear(EhU + (0.5 * dt) * k2)
        k4 = self.nonlinear(E1 * U + dt * (Eh * k3))
        out = E1 * U + (dt / 6.0) * (E1 * k1 + 2.0 * Eh * (k2 + k3) + k4)
        out[0] = 0.0
        return out

    def measure(self, U: np.ndarray, u_phys: np.ndarray):
        n2 = float(self.n) ** 2
        p = np.abs(U) ** 2
        energy = float(np.dot(self.w_energy, p)) / n2
        enstrophy = float(np.dot(self.w_enstrophy, p)) / n2
        maxslope = self.flux.max_speed(u_phys)
        return energy, enstrophy, maxslope


def step(state: PeriodicField, dt: float, config: RunConfig) -> PeriodicField:
    """Advance one step of size dt; dt must respect stable_dt(state, config)."""
    if dt <= 0:
        raise DomainError("dt must be positive")
    if dt > stable_dt(state, config) * (1 + 1e-9):
        raise DomainError(f"dt={dt} exceeds stable_dt={stable_dt(state, config)}")
    kern = _Kernel(config)
    U = kern.step(kern.load(state), dt)
    out = kern.physical(U)
    if not np.all(np.isfinite(out)):
        raise InstabilityError("non-finite state after step", step=0)
    return PeriodicField(out)


def integrate(config: RunConfig) -> Trajectory:
    """Run the configured integration, landing snapshots exactly on their times."""
    kern = _Kernel(config)
    dx = 1.0 / config.n_grid
    snap_times = list(config.snapshot_times)
    snapshots = []
    if snap_times and snap_times[0] == 0.0:
        snapshots.append((0.0, config.u0))
        snap_times.pop(0)

    cols: dict[str, list] = {k: [] for k in ("step", "t", "dt", "energy", "enstrophy", "maxslope")}
    U = kern.load(config.u0)
    t = 0.0
    step_idx = 0
    next_events = snap_times + ([config.t_end] if (not snap_times or snap_times[-1] < config.t_end) else [])
    e0 = None

    for t_event in next_events:
        while t < t_event - 1e-13:
            u_phys = kern.physical(U)
            energy, enstrophy, maxslope = kern.measure(U, u_phys)
            if e0 is None:
                e0 = max(energy, 1e-300)
            if not np.isfinite(energy) or energy > 1e6 * e0:
                raise InstabilityError(f"blow-up at step {step_idx}, t={t:.6g}", step=step_idx)
            dt_target = dx if maxslope == 0.0 else config.cfl_safety * dx / maxslope
            if t + dt_target >= t_event - 1e-13:
                dt_use = t_event - t
                landed = True
            else:
                dt_use = _quantize_dt(dt_target)
                landed = False
            cols["step"].append(step_idx)
            cols["t"].append(t)
            cols["dt"].append(dt_use)
            cols["energy"].append(energy)
            cols["enstrophy"].append(enstrophy)
            cols["maxslope"].append(maxslope)
            U = kern.step(U, dt_use, u_phys)
            step_idx += 1
            t = t_event if landed else t + dt_use
        t = t_event
        if snap_times and abs(t_event - snap_times[0]) < 1e-13:
            snap_times.pop(0)
            snapshots.append((t_event, PeriodicField(kern.physical(U))))

    # terminal stats row (dt = 0) so window sups and trapezoids see the endpoint
    u_phys = kern.physical(U)
    if not np.all(np.isfinite(u_phys)):
        raise InstabilityError(f"non-finite final state at step {step_idx}", step=step_idx)
    energy, enstrophy, maxslope = kern.measure(U, u_phys)
    cols["step"].append(step_idx)
    cols["t"].append(t)
    cols["dt"].append(0.0)
    cols["energy"].append(energy)
    cols["enstrophy"].append(enstrophy)
    cols["maxslope"].append(maxslope)

    stats = StepStats(
        step=np.array(cols["step"], dtype=int),
        t=np.array(cols["t"]),
        dt=np.array(cols["dt"]),
        energy=np.array(cols["energy"]),
        enstrophy=np.array(cols["enstrophy"]),
        maxslope=np.array(cols["maxslope"]),
    )
    traj = Trajectory(config=config, snapshots=snapshots, stats=stats)
    _check_energy_monotone(traj)
    return traj


def _check_energy_monotone(traj: Trajectory) -> None:
    es = [float(np.mean(f.samples**2)) for _, f in traj.snapshots]
    for a, b in zip(es, es[1:]):
        if b > a * (1 + 1e-9) + 1e-300:
            raise NumericsError(f"snapshot energy increased: {a} -> {b}")


def energy_balance_residual(traj: Trajectory) -> float:
    """Largest violation of d|u|^2/dt = -2 nu ||u||_1^2 across snapshot intervals.

    The dissipation integral uses the trapezoid rule on per-step stats.
    """
    if len(traj.snapshots) < 2:
        raise DomainError("need at least two snapshots")
    st = traj.stats
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (st.enstrophy[1:] + st.enstrophy[:-1]) * np.diff(st.t))])
    worst = 0.0
    for (t1, f1), (t2, f2) in zip(traj.snapshots, traj.snapshots[1:]):
        e1 = float(np.mean(f1.samples**2))
        e2 = float(np.mean(f2.samples**2))
        if e1 < 1e-300:
            continue
        diss = np.interp(t2, st.t, cum) - np.interp(t1, st.t, cum)
        worst = max(worst, abs(e2 - e1 + 2.0 * traj.config.nu * diss) / e1)
    return worst


def seeded_initial(seed: int, n_grid: int, j_max: int = 8, decay: float = 2.0) -> PeriodicField:
    """Random low-mode profile sum of a_j sin(2 pi j x + phi_j), |u0|_inf = 1.

    Normalization uses a fixed dense reference grid so the same seed gives the
    same continuum profile on every n_grid.
    """
    if not 1 <= j_max <= 8:
        raise ConfigError("j_max must lie in 1..8")
    rng = np.random.default_rng(seed)
    amps = rng.uniform(0.5, 1.0, j_max) * np.arange(1, j_max + 1, dtype=float) ** (-decay)
    phases = rng.uniform(0.0, _TWO_PI, j_max)

    def evaluate(x):
        u = np.zeros_like(x)
        for j in range(j_max):
            u += amps[j] * np.sin(_TWO_PI * (j + 1) * x + phases[j])
        return u

    x_ref = np.arange(65536) / 65536.0
    peak = np.max(np.abs(evaluate(x_ref)))
    x = np.arange(n_grid) / n_grid
    return PeriodicField(evaluate(x) / peak)


def trajectory_to_files(traj: Trajectory, fields_path, stats_path, header: str | None = None) -> None:
    """Write snapshots to the binary container and stats to CSV."""
    from .field import write_binary_sequence

    write_binary_sequence(fields_path, [(f, t, traj.config.nu) for t, f in traj.snapshots])
    traj.stats.to_csv(stats_path, header=header)
