"""Command line front end: simulate, oracle, diagnose, sweep, fit, report.

Configs are JSON. Every tabular artifact starts with a header line recording
the semantic config hash and the package version, so reruns are checkable by
byte comparison. Exit codes: 0 success, 2 config or missing-input error,
3 numerical failure, 4 fit verdict failure (fit verb only).
"""
from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys

import numpy as np

from . import __version__
from .cache import run_cached
from .cole_hopf import solve_classical
from .diagnostics import RangeSpec, diagnose, report_to_files
from .errors import ConfigError, NumericsError
from .field import PeriodicField, ramp_field, sine_field, write_binary_sequence
from .flux import make_flux
from .inviscid import solve_inviscid
from .scaling import (
    SUITE_CFL,
    SweepBase,
    exponent_report,
    suite_ell_grid,
    sweep_nu,
    write_fits_csv,
)
from .solver import RunConfig, integrate, resolution_floor, seeded_initial

_VERBS = ("simulate", "oracle", "diagnose", "sweep", "fit", "report")
_FLUX_FAMILIES = ("quadratic", "quartic", "cosh")
_U0_KINDS = ("seeded", "sine", "ramp")

_DEFAULTS = {
    "n_grid": "auto",
    "t_end": None,
    "snapshots": "suite",
    "u0": "seeded",
    "seeds": [0],
    "K": 10.0,
    "M": 2.0,
    "ranges": {"K": 2.0},
    "p_list": [0.5, 1.0, 2.0, 3.0, 4.0],
    "alphas": [1.0, 2.0],
    "ell_list": "suite",
    "k_list": "auto",
    "oversample": 1,
    "cfl_safety": SUITE_CFL,
    "oracle": None,
    "t": None,
    "n_out": None,
    "workers": 1,
    "deterministic": False,
    "output_dir": "burgulence_out",
    "cache_dir": None,
}

# keys that do not change any computed number
_NON_SEMANTIC = ("workers", "output_dir", "cache_dir")


def _fail(path: str, msg: str):
    raise ConfigError(f"{path}: {msg}")


def _want_number(cfg, key, positive=True, allow_none=False):
    v = cfg[key]
    if v is None and allow_none:
        return
    if not isinstance(v, (int, float)) or isinstance(v, bool) or not math.isfinite(v):
        _fail(key, "must be a finite number")
    if positive and v <= 0:
        _fail(key, "must be positive")


def _want_number_list(cfg, key, positive=True):
    v = cfg[key]
    if not isinstance(v, list) or not v:
        _fail(key, "must be a nonempty list of numbers")
    for i, x in enumerate(v):
        if not isinstance(x, (int, float)) or isinstance(x, bool) or not math.isfinite(x):
            _fail(f"{key}[{i}]", "must be a finite number")
        if positive and x <= 0:
            _fail(f"{key}[{i}]", "must be positive")


def _is_pow2(n) -> bool:
    return isinstance(n, int) and not isinstance(n, bool) and n > 0 and (n & (n - 1)) == 0


def _check_flux(cfg):
    v = cfg["flux"]
    if isinstance(v, str):
        v = {"family": v}
    if not isinstance(v, dict):
        _fail("flux", "must be a family name or an object with a family field")
    if "family" not in v:
        _fail("flux.family", "required")
    if v["family"] not in _FLUX_FAMILIES:
        _fail("flux.family", f"must be one of {', '.join(_FLUX_FAMILIES)}")
    for k in v:
        if k not in ("family", "epsilon", "u_max"):
            _fail(f"flux.{k}", "unknown key")
    if "epsilon" in v:
        if not isinstance(v["epsilon"], (int, float)) or v["epsilon"] < 0:
            _fail("flux.epsilon", "must be a number >= 0")
    if "u_max" in v:
        if not isinstance(v["u_max"], (int, float)) or v["u_max"] <= 0:
            _fail("flux.u_max", "must be positive")
    cfg["flux"] = v


def _check_u0(cfg):
    v = cfg["u0"]
    if isinstance(v, str):
        v = {"kind": v}
    if not isinstance(v, dict) or "kind" not in v:
        _fail("u0.kind", "required")
    if v["kind"] not in _U0_KINDS:
        _fail("u0.kind", f"must be one of {', '.join(_U0_KINDS)}")
    for k in v:
        if k not in ("kind", "amplitude", "mode"):
            _fail(f"u0.{k}", "unknown key")
    if v.get("amplitude") is not None and (
        not isinstance(v["amplitude"], (int, float)) or v["amplitude"] <= 0
    ):
        _fail("u0.amplitude", "must be positive")
    if v.get("mode") is not None and (not isinstance(v["mode"], int) or v["mode"] < 1):
        _fail("u0.mode", "must be an integer >= 1")
    cfg["u0"] = v


def _check_ranges(cfg):
    v = cfg["ranges"]
    if not isinstance(v, dict):
        _fail("ranges", "must be an object")
    for k in v:
        if k not in ("K", "C1", "C2", "nu0"):
            _fail(f"ranges.{k}", "unknown key")
    if "K" not in v:
        _fail("ranges.K", "required")
    try:
        base = RangeSpec.from_K(float(v["K"]))
        cfg["_ranges"] = RangeSpec(
            K=float(v["K"]),
            nu0=float(v.get("nu0", base.nu0)),
            C1=float(v.get("C1", base.C1)),
            C2=float(v.get("C2", base.C2)),
        )
    except (ConfigError, ValueError, TypeError) as exc:
        _fail("ranges", str(exc))


def parse_config(path) -> dict:
    """Load, validate, and default-fill a run configuration.

    Raises ConfigError naming the offending field; the caller maps that to
    exit code 2.
    """
    with open(path) as f:
        try:
            raw = json.load(f)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config: top level must be an object")

    cfg = dict(_DEFAULTS)
    known = set(_DEFAULTS) | {"flux", "nu", "nu_list"}
    for k, v in raw.items():
        if k not in known:
            _fail(k, "unknown key")
        cfg[k] = v

    if "flux" not in cfg:
        _fail("flux", "required")
    _check_flux(cfg)

    if ("nu" in cfg) == ("nu_list" in cfg):
        raise ConfigError("nu: provide exactly one of nu or nu_list")
    if "nu" in cfg:
        _want_number(cfg, "nu")
        cfg["nu_list"] = [float(cfg["nu"])]
    else:
        _want_number_list(cfg, "nu_list")
        cfg["nu_list"] = [float(x) for x in cfg["nu_list"]]
    cfg.pop("nu", None)

    if cfg["n_grid"] != "auto" and not (_is_pow2(cfg["n_grid"]) and cfg["n_grid"] >= 16):
        _fail("n_grid", "must be 'auto' or a power of two >= 16")
    _want_number(cfg, "t_end", allow_none=True)
    if cfg["snapshots"] != "suite":
        _want_number_list(cfg, "snapshots", positive=False)
        ts = cfg["snapshots"]
        if any(b <= a for a, b in zip(ts, ts[1:])):
            _fail("snapshots", "times must be strictly increasing")
        if ts[0] < 0:
            _fail("snapshots[0]", "must be >= 0")
    _check_u0(cfg)

    if (
        not isinstance(cfg["seeds"], list)
        or not cfg["seeds"]
        or any(not isinstance(s, int) or isinstance(s, bool) or s < 0 for s in cfg["seeds"])
    ):
        _fail("seeds", "must be a nonempty list of integers >= 0")
    _want_number(cfg, "K")
    if cfg["K"] <= 1:
        _fail("K", "must exceed 1")
    _want_number(cfg, "M")
    if cfg["M"] < 1:
        _fail("M", "must be >= 1")
    _check_ranges(cfg)
    _want_number_list(cfg, "p_list")
    _want_number_list(cfg, "alphas")
    if cfg["ell_list"] != "suite":
        _want_number_list(cfg, "ell_list")
        if any(x > 0.5 for x in cfg["ell_list"]):
            _fail("ell_list", "separations must lie in (0, 1/2]")
    if cfg["k_list"] != "auto":
        if not isinstance(cfg["k_list"], list) or any(
            not isinstance(k, int) or k < 1 for k in cfg["k_list"]
        ):
            _fail("k_list", "must be 'auto' or a list of integers >= 1")
    if not _is_pow2(cfg["oversample"]):
        _fail("oversample", "must be a power of two >= 1")
    _want_number(cfg, "cfl_safety")
    if cfg["oracle"] is not None and cfg["oracle"] not in ("cole-hopf", "lax-oleinik"):
        _fail("oracle", "must be cole-hopf or lax-oleinik")
    _want_number(cfg, "t", allow_none=True)
    if cfg["n_out"] is not None and not (_is_pow2(cfg["n_out"]) and cfg["n_out"] >= 16):
        _fail("n_out", "must be a power of two >= 16")
    if not isinstance(cfg["workers"], int) or cfg["workers"] < 1:
        _fail("workers", "must be an integer >= 1")
    if not isinstance(cfg["deterministic"], bool):
        _fail("deterministic", "must be true or false")
    if not isinstance(cfg["output_dir"], str) or not cfg["output_dir"]:
        _fail("output_dir", "must be a directory path")
    if cfg["cache_dir"] is not None and not isinstance(cfg["cache_dir"], str):
        _fail("cache_dir", "must be a directory path")
    return cfg


def cli_header(cfg) -> str:
    """Header line content: package version plus semantic config hash."""
    sem = {k: v for k, v in cfg.items() if k not in _NON_SEMANTIC and k != "_ranges"}
    blob = json.dumps(sem, sort_keys=True, separators=(",", ":"))
    h = hashlib.sha256(blob.encode()).hexdigest()[:16]
    return f"burgulence {__version__} config {h}"


# ------------------------------------------------------------ run assembly

def _resolve_n_grid(cfg, nu: float) -> int:
    if cfg["n_grid"] == "auto":
        return resolution_floor(nu) * cfg["oversample"]
    return cfg["n_grid"]


def _build_u0(cfg, seed: int, n_grid: int) -> PeriodicField:
    spec = cfg["u0"]
    if spec["kind"] == "seeded":
        return seeded_initial(seed, n_grid)
    if spec["kind"] == "sine":
        return sine_field(n_grid, spec.get("amplitude", 1.0), spec.get("mode", 1))
    return ramp_field(n_grid)


def _snapshot_times(cfg) -> list:
    t_end = cfg["t_end"]
    if cfg["snapshots"] != "suite":
        ts = [float(t) for t in cfg["snapshots"]]
        if ts[-1] > t_end + 1e-12:
            _fail("snapshots", f"last time {ts[-1]} exceeds t_end {t_end}")
        return ts
    dense_end = min(1.0, t_end)
    ts = [0.0] + [0.02 * j for j in range(1, int(round(dense_end / 0.02)) + 1)]
    k = 1
    while 1.0 + 0.25 * k <= t_end + 1e-12:
        ts.append(1.0 + 0.25 * k)
        k += 1
    if t_end - ts[-1] > 1e-12:
        ts.append(t_end)
    return ts


def _single_run_config(cfg) -> RunConfig:
    if len(cfg["nu_list"]) != 1:
        _fail("nu", "this verb needs a single viscosity")
    if len(cfg["seeds"]) != 1:
        _fail("seeds", "this verb needs a single seed")
    if cfg["t_end"] is None:
        _fail("t_end", "required")
    nu = cfg["nu_list"][0]
    n = _resolve_n_grid(cfg, nu)
    fx = cfg["flux"]
    return RunConfig(
        nu=nu,
        flux=make_flux(fx["family"], fx.get("epsilon", 0.0), fx.get("u_max", 4.0)),
        u0=_build_u0(cfg, cfg["seeds"][0], n),
        n_grid=n,
        t_end=float(cfg["t_end"]),
        snapshot_times=np.array(_snapshot_times(cfg)),
        cfl_safety=float(cfg["cfl_safety"]),
    )


def _sweep_base(cfg) -> SweepBase:
    for key in ("t_end", "n_out", "t"):
        if cfg[key] is not None:
            _fail(key, "sweeps derive run shapes from the frozen recipe; remove the key")
    if cfg["snapshots"] != "suite" or cfg["n_grid"] != "auto":
        raise ConfigError("snapshots/n_grid: sweeps use the frozen recipe; leave both at defaults")
    if cfg["u0"]["kind"] != "seeded":
        _fail("u0.kind", "sweeps run seeded initial data only")
    return SweepBase(
        ranges=cfg["_ranges"],
        oversample=cfg["oversample"],
        K=float(cfg["K"]),
        M=float(cfg["M"]),
        p_list=tuple(float(p) for p in cfg["p_list"]),
        alphas=tuple(float(a) for a in cfg["alphas"]),
        cfl_safety=float(cfg["cfl_safety"]),
        cache_root=cfg["cache_dir"],
        workers=cfg["workers"],
    )


# ------------------------------------------------------------------ verbs

def _cmd_simulate(cfg, out: str, hdr: str) -> int:
    rc = _single_run_config(cfg)
    traj = integrate(rc)
    os.makedirs(out, exist_ok=True)
    write_binary_sequence(
        os.path.join(out, "fields.bin"),
        [(f, float(t), rc.nu) for t, f in traj.snapshots],
    )
    traj.stats.to_csv(os.path.join(out, "stats.csv"), header=hdr)
    return 0


def _cmd_oracle(cfg, out: str, hdr: str) -> int:
    kind = cfg["oracle"]
    if kind is None:
        _fail("oracle", "required for the oracle verb")
    if cfg["t"] is not None:
        times = [float(cfg["t"])]
    elif cfg["snapshots"] != "suite":
        times = [float(t) for t in cfg["snapshots"]]
    else:
        _fail("t", "oracle needs t or an explicit snapshots list")
    nu = cfg["nu_list"][0] if cfg["nu_list"] else None
    fx = cfg["flux"]
    if cfg["n_grid"] == "auto" and (kind == "lax-oleinik" or nu is None):
        _fail("n_grid", "set an explicit grid for inviscid oracle output")
    n = _resolve_n_grid(cfg, nu) if cfg["n_grid"] == "auto" else cfg["n_grid"]
    n_out = cfg["n_out"] or n
    u0 = _build_u0(cfg, cfg["seeds"][0], n)
    os.makedirs(out, exist_ok=True)
    if kind == "cole-hopf":
        if fx["family"] != "quadratic":
            _fail("flux.family", "cole-hopf exists for the quadratic flux only")
        if len(cfg["nu_list"]) != 1:
            _fail("nu", "cole-hopf needs a single viscosity")
        for t in times:
            field = solve_classical(u0, nu, t, n_out)
            field.to_csv(os.path.join(out, f"cole_hopf_t{t:g}.csv"), header=hdr)
        return 0
    flux = make_flux(fx["family"], fx.get("epsilon", 0.0), fx.get("u_max", 4.0))
    for t in times:
        sol = solve_inviscid(u0, flux, t, n_out)
        sol.field.to_csv(os.path.join(out, f"lax_oleinik_t{t:g}.csv"), header=hdr)
        sol.shocks_to_csv(os.path.join(out, f"shocks_t{t:g}.csv"), header=hdr)
    return 0


def _cmd_diagnose(cfg, out: str, hdr: str) -> int:
    rc = _single_run_config(cfg)
    traj = run_cached(rc, root=cfg["cache_dir"])
    nu = rc.nu
    ells = (
        suite_ell_grid(nu, rc.n_grid, cfg["_ranges"])
        if cfg["ell_list"] == "suite"
        else np.asarray(cfg["ell_list"], dtype=float)
    )
    report = diagnose(
        traj,
        K=float(cfg["K"]),
        ranges=cfg["_ranges"],
        p_list=tuple(float(p) for p in cfg["p_list"]),
        ell_list=ells,
        k_list=None if cfg["k_list"] == "auto" else cfg["k_list"],
        M=float(cfg["M"]),
        alphas=tuple(float(a) for a in cfg["alphas"]),
    )
    report_to_files(report, out, header=hdr)
    return 0


def _run_sweep(cfg):
    base = _sweep_base(cfg)
    return sweep_nu(base, cfg["nu_list"], cfg["seeds"])


def _cmd_sweep(cfg, out: str, hdr: str) -> int:
    res = _run_sweep(cfg)
    os.makedirs(out, exist_ok=True)
    res.to_csv(os.path.join(out, "sweep.csv"), header=hdr)
    return 0


def _fit_exit_code(fits) -> int:
    return 4 if any(f.verdict == "fail" for f in fits) else 0


def _cmd_fit(cfg, out: str, hdr: str) -> int:
    res = _run_sweep(cfg)
    fits = exponent_report(res)
    os.makedirs(out, exist_ok=True)
    write_fits_csv(fits, os.path.join(out, "fits.csv"), header=hdr)
    return _fit_exit_code(fits)


# ----------------------------------------------------------------- report

_PALETTE = ("#1965b0", "#dc050c", "#4eb265", "#882e72", "#f1932d", "#7bafde")


def _gmean_local(vals):
    vals = np.asarray(vals, dtype=float)
    if np.any(vals <= 0):
        return 0.0
    return float(np.exp(np.mean(np.log(vals))))


def _read_sweep_csv(path):
    """Parse sweep.csv back into {(nu, quantity, params): {seed: value}}."""
    table = {}
    with open(path) as f:
        for line in f:
            line = line.strip()
            if not line or line.startswith("#") or line.startswith("nu,"):
                continue
            nu_s, seed_s, quantity, params, value = line.split(",")
            key = (float(nu_s), quantity, params)
            table.setdefault(key, {})[int(seed_s)] = float(value)
    return table


def _series_from(table, quantity, param_key):
    """Per-nu series of (x, gmean over seeds) for one swept quantity."""
    out = {}
    for (nu, q, params), per_seed in table.items():
        if q != quantity:
            continue
        fields = dict(p.split("=", 1) for p in params.split(";"))
        if param_key not in fields:
            continue
        x = float(fields[param_key])
        out.setdefault(nu, []).append((x, _gmean_local(list(per_seed.values()))))
    return {
        nu: sorted((x, v) for x, v in pts if v > 0) for nu, pts in out.items()
    }


def _svg_loglog(series, guides, title, xlabel, ylabel):
    """Self-contained log-log SVG line plot.

    series: list of (label, xs, ys); guides: list of (slope, label) lines
    anchored to the first series' trailing point. Deterministic output.
    """
    W, H = 660, 430
    ML, MR, MT, MB = 64, 16, 34, 48
    xs_all = np.concatenate([np.asarray(s[1], dtype=float) for s in series])
    ys_all = np.concatenate([np.asarray(s[2], dtype=float) for s in series])
    lx0 = math.floor(math.log10(xs_all.min()))
    lx1 = math.ceil(math.log10(xs_all.max()))
    ly0 = math.floor(math.log10(ys_all.min()))
    ly1 = math.ceil(math.log10(ys_all.max()))
    lx1, ly1 = max(lx1, lx0 + 1), max(ly1, ly0 + 1)

    def px(x):
        return ML + (math.log10(x) - lx0) / (lx1 - lx0) * (W - ML - MR)

    def py(y):
        return H - MB - (math.log10(y) - ly0) / (ly1 - ly0) * (H - MT - MB)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
        f'viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>',
        f'<text x="{W / 2:.2f}" y="20" text-anchor="middle" font-size="14">{title}</text>',
    ]
    for d in range(lx0, lx1 + 1):
        x = px(10.0**d)
        parts.append(
            f'<line x1="{x:.2f}" y1="{MT}" x2="{x:.2f}" y2="{H - MB}" '
            f'stroke="#dddddd" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{x:.2f}" y="{H - MB + 16}" text-anchor="middle">1e{d}</text>'
        )
    for d in range(ly0, ly1 + 1):
        y = py(10.0**d)
        parts.append(
            f'<line x1="{ML}" y1="{y:.2f}" x2="{W - MR}" y2="{y:.2f}" '
            f'stroke="#dddddd" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{ML - 6}" y="{y + 4:.2f}" text-anchor="end">1e{d}</text>'
        )
    parts.append(
        f'<rect x="{ML}" y="{MT}" width="{W - ML - MR}" height="{H - MT - MB}" '
        f'fill="none" stroke="#333333"/>'
    )
    parts.append(
        f'<text x="{W / 2:.2f}" y="{H - 10}" text-anchor="middle">{xlabel}</text>'
    )
    parts.append(
        f'<text x="16" y="{H / 2:.2f}" text-anchor="middle" '
        f'transform="rotate(-90 16 {H / 2:.2f})">{ylabel}</text>'
    )
    for i, (label, xs, ys) in enumerate(series):
        color = _PALETTE[i % len(_PALETTE)]
        pts = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in zip(xs, ys))
        parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.6"/>'
        )
        for x, y in zip(xs, ys):
            parts.append(
                f'<circle cx="{px(x):.2f}" cy="{py(y):.2f}" r="2.4" fill="{color}"/>'
            )
        parts.append(
            f'<text x="{W - MR - 8}" y="{MT + 16 + 15 * i}" text-anchor="end" '
            f'fill="{color}">{label}</text>'
        )
    if series and guides:
        _, xs0, ys0 = series[0]
        xa, ya = float(xs0[-1]), float(ys0[-1])
        xg0, xg1 = float(np.min(xs_all)), float(np.max(xs_all))
        for j, (slope, label) in enumerate(guides):
            yg0 = 1.6 * ya * (xg0 / xa) ** slope
            yg1 = 1.6 * ya * (xg1 / xa) ** slope
            parts.append(
                f'<line x1="{px(xg0):.2f}" y1="{py(yg0):.2f}" x2="{px(xg1):.2f}" '
                f'y2="{py(yg1):.2f}" stroke="#777777" stroke-width="1.2" '
                f'stroke-dasharray="6 4"/>'
            )
            parts.append(
                f'<text x="{px(xg0) + 4:.2f}" y="{py(yg0) - 5:.2f}" '
                f'fill="#777777">{label}</text>'
            )
    parts.append("</svg>")
    return "\n".join(parts)


def _cmd_report(cfg, out: str, hdr: str) -> int:
    sweep_path = os.path.join(out, "sweep.csv")
    if not os.path.exists(sweep_path):
        raise ConfigError(f"{sweep_path}: not found; run the sweep verb first")
    table = _read_sweep_csv(sweep_path)
    spectra = _series_from(table, "spectrum", "k")
    flatness = _series_from(table, "flatness", "ell")
    nus = sorted({nu for nu, _, _ in table})
    nu_star = min(nus)

    sp_series = []
    for p in cfg["p_list"]:
        pts = {}
        for (nu, q, params), per_seed in table.items():
            if q != "sp" or nu != nu_star:
                continue
            fields = dict(kv.split("=", 1) for kv in params.split(";"))
            if abs(float(fields["p"]) - p) > 1e-12:
                continue
            pts[float(fields["ell"])] = _gmean_local(list(per_seed.values()))
        pts = sorted((x, v) for x, v in pts.items() if v > 0)
        if len(pts) >= 2:
            sp_series.append(
                (f"p={p:g}", [x for x, _ in pts], [v for _, v in pts])
            )

    lines = [
        f"<!-- {hdr} -->",
        "",
        "# Burgers turbulence summary",
        "",
        f"Viscosities: {', '.join(f'{nu:g}' for nu in nus)}. "
        f"Seeds per viscosity: {len(cfg['seeds'])}.",
        "",
    ]

    fits_path = os.path.join(out, "fits.csv")
    if os.path.exists(fits_path):
        lines += ["## Fits", "", "| quantity | range | slope | predicted | verdict |", "| --- | --- | --- | --- | --- |"]
        with open(fits_path) as f:
            for row in f:
                row = row.strip()
                if not row or row.startswith("#") or row.startswith("quantity,"):
                    continue
                q, rng, slope, _stderr, predicted, _tol, verdict = row.split(",")
                s = "" if slope == "nan" else f"{float(slope):.4f}"
                lines.append(f"| {q} | {rng} | {s} | {float(predicted):g} | {verdict} |")
        lines.append("")

    spec_series = [
        (f"nu={nu:g}", [x for x, _ in pts], [v for _, v in pts])
        for nu, pts in sorted(spectra.items())
        if len(pts) >= 2
    ]
    if spec_series:
        lines += [
            "## Energy spectrum",
            "",
            _svg_loglog(spec_series, [(-2.0, "slope -2")],
                        "Layer-averaged spectrum", "k", "E(k)"),
            "",
        ]
    if sp_series:
        guides = sorted({min(float(p), 1.0) for p in cfg["p_list"]})
        lines += [
            f"## Structure functions at nu = {nu_star:g}",
            "",
            _svg_loglog(sp_series, [(g, f"slope {g:g}") for g in guides],
                        "Increment moments", "ell", "S_p(ell)"),
            "",
        ]
    flat_series = [
        (f"nu={nu:g}", [x for x, _ in pts], [v for _, v in pts])
        for nu, pts in sorted(flatness.items())
        if len(pts) >= 2
    ]
    if flat_series:
        lines += [
            "## Flatness",
            "",
            _svg_loglog(flat_series, [(-1.0, "slope -1")],
                        "Flatness of increments", "ell", "F(ell)"),
            "",
        ]
    with open(os.path.join(out, "report.md"), "w") as f:
        f.write("\n".join(lines))
    return 0


_DISPATCH = {
    "simulate": _cmd_simulate,
    "oracle": _cmd_oracle,
    "diagnose": _cmd_diagnose,
    "sweep": _cmd_sweep,
    "fit": _cmd_fit,
    "report": _cmd_report,
}


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="burgulence",
        description="Decaying Burgers turbulence runs, diagnostics, and scaling fits.",
    )
    ap.add_argument("verb", choices=_VERBS)
    ap.add_argument("--config", required=True, help="JSON run configuration")
    ap.add_argument("--out", default=None, help="output directory (default: config output_dir)")
    ap.add_argument("--workers", type=int, default=None, help="override config worker count")
    ap.add_argument("--deterministic", action="store_true",
                    help="force serial execution and record the flag in headers")
    ap.add_argument("--seed-base", type=int, default=0, help="offset added to every seed")
    ns = ap.parse_args(argv)
    try:
        cfg = parse_config(ns.config)
        if ns.workers is not None:
            if ns.workers < 1:
                raise ConfigError("--workers: must be >= 1")
            cfg["workers"] = ns.workers
        if ns.deterministic:
            cfg["deterministic"] = True
        if cfg["deterministic"]:
            cfg["workers"] = 1
        if ns.seed_base:
            cfg["seeds"] = [s + ns.seed_base for s in cfg["seeds"]]
        out = ns.out or cfg["output_dir"]
        return _DISPATCH[ns.verb](cfg, out, cli_header(cfg))
    except (ValueError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except NumericsError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
