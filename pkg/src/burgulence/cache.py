"""Disk cache for completed integrations, keyed by exact configuration.

Long runs at small viscosity are the expensive part of every sweep, so
finished trajectories are persisted under a hash of the full run
configuration and replayed on demand. Per-step statistics are decimated
before storage; the rows achieving the running extrema are always kept so
window constants recomputed from a cached run match the live ones.
"""

import gzip
import json
import os
from pathlib import Path

import numpy as np

from . import __version__
from .field import read_binary_sequence, write_binary_sequence
from .solver import RunConfig, StepStats, Trajectory, config_hash, integrate

ENV_CACHE_DIR = "BURGULENCE_CACHE_DIR"

# cap on stored stat rows per run; extrema rows survive decimation
MAX_STAT_ROWS = 200_000


def cache_dir() -> Path:
    env = os.environ.get(ENV_CACHE_DIR)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "burgulence"


def _decimate_stats(stats: StepStats) -> StepStats:
    n = len(stats)
    if n <= MAX_STAT_ROWS:
        return stats
    stride = int(np.ceil(n / MAX_STAT_ROWS))
    keep = set(range(0, n, stride))
    keep.add(n - 1)
    # preserve the exact suprema seen by window and audit constants
    keep.add(int(np.argmax(stats.enstrophy)))
    keep.add(int(np.argmax(stats.maxslope)))
    keep.add(int(np.argmax(stats.energy)))
    idx = np.array(sorted(keep), dtype=int)
    return StepStats(
        step=stats.step[idx],
        t=stats.t[idx],
        dt=stats.dt[idx],
        energy=stats.energy[idx],
        enstrophy=stats.enstrophy[idx],
        maxslope=stats.maxslope[idx],
    )


def _stats_to_gz(stats: StepStats, path: Path) -> None:
    cols = np.column_stack(
        [
            stats.step.astype(np.float64),
            stats.t,
            stats.dt,
            stats.energy,
            stats.enstrophy,
            stats.maxslope,
        ]
    )
    with gzip.open(path, "wb") as f:
        np.save(f, cols)


def _stats_from_gz(path: Path) -> StepStats:
    with gzip.open(path, "rb") as f:
        cols = np.load(f)
    return StepStats(
        step=cols[:, 0].astype(int),
        t=cols[:, 1],
        dt=cols[:, 2],
        energy=cols[:, 3],
        enstrophy=cols[:, 4],
        maxslope=cols[:, 5],
    )


def save_trajectory(traj: Trajectory, root=None) -> Path:
    root = Path(root) if root is not None else cache_dir()
    key = config_hash(traj.config)
    d = root / key
    d.mkdir(parents=True, exist_ok=True)
    nu = traj.config.nu
    write_binary_sequence(d / "fields.bin", [(f, t, nu) for t, f in traj.snapshots])
    _stats_to_gz(_decimate_stats(traj.stats), d / "stats.npy.gz")
    meta = {
        "config": traj.config.canonical_dict(),
        "config_hash": key,
        "version": __version__,
        "n_steps": int(traj.stats.step[-1]),
        "sup_enstrophy": float(np.max(traj.stats.enstrophy)),
        "sup_maxslope": float(np.max(traj.stats.maxslope)),
    }
    tmp = d / "meta.json.tmp"
    tmp.write_text(json.dumps(meta, indent=1, sort_keys=True))
    tmp.rename(d / "meta.json")
    return d


def load_trajectory(config: RunConfig, root=None):
    """Return the cached trajectory for config, or None on a miss."""
    root = Path(root) if root is not None else cache_dir()
    d = root / config_hash(config)
    meta_path = d / "meta.json"
    if not meta_path.exists():
        return None
    try:
        meta = json.loads(meta_path.read_text())
        if meta.get("config") != config.canonical_dict():
            return None
        records = read_binary_sequence(d / "fields.bin")
        stats = _stats_from_gz(d / "stats.npy.gz")
    except (OSError, ValueError, KeyError):
        return None
    snapshots = [(t, f) for f, t, _ in records]
    return Trajectory(config=config, snapshots=snapshots, stats=stats)


def run_cached(config: RunConfig, root=None, refresh: bool = False) -> Trajectory:
    """Integrate config, or replay it from the on-disk cache."""
    if not refresh:
        traj = load_trajectory(config, root=root)
        if traj is not None:
            return traj
    traj = integrate(config)
    save_trajectory(traj, root=root)
    return traj
