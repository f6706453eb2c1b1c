"""Pseudo-spectral solver and turbulence diagnostics for scalar conservation
laws u_t + (f(u))_x = nu u_xx on the unit circle."""

__version__ = "0.1.0"

from .cole_hopf import HeatPotential, heat_potential, solve_classical
from .errors import (
    ConfigError,
    CoverageError,
    DiscontinuityWarning,
    DomainError,
    FlatnessError,
    InstabilityError,
    NumericsError,
    ResolutionWarning,
    SpanError,
)
from .field import (
    PeriodicField,
    from_function,
    project_zero_mean,
    ramp_field,
    read_binary,
    read_binary_sequence,
    sine_field,
    write_binary_sequence,
)
from .flux import FluxModel, convexity_bound, flux_eval, inverse_slope, legendre, make_flux
from .inviscid import (
    InviscidSolution,
    characteristics_eval,
    lax_oleinik_eval,
    robust_slopes,
    shock_time,
    solve_inviscid,
)
from .solver import (
    RunConfig,
    StepStats,
    Trajectory,
    config_hash,
    energy_balance_residual,
    integrate,
    resolution_floor,
    seeded_initial,
    stable_dt,
    trajectory_to_files,
)
from .cache import load_trajectory, run_cached, save_trajectory
from .scaling import (
    INVISCID_N_OUT,
    INVISCID_SEED,
    INVISCID_U0_GRID,
    MINI_NU_LIST,
    SUITE_CFL,
    SUITE_NU_LIST,
    SUITE_SEEDS,
    ScalingFit,
    SweepBase,
    SweepResult,
    exponent_report,
    fit_loglog,
    fixed_ratio_ell,
    inviscid_report,
    inviscid_suite_inputs,
    inviscid_t_list,
    lo_sequence,
    mini_config,
    predicted_gamma,
    predicted_zeta,
    suite_config,
    suite_ell_grid,
    sweep_nu,
    trimmed_j1,
    trimmed_j2,
    write_fits_csv,
)
from .diagnostics import (
    DiagnosticsReport,
    RangeSpec,
    SnapshotClass,
    WindowSpec,
    amplitude_audit,
    averaging_window,
    calibrate_K,
    classify_snapshot,
    cliff_profile,
    diagnose,
    energy_spectrum,
    estimate_C_tilde,
    flatness,
    lk_fraction,
    oleinik_audit,
    positive_increment_average,
    quantity_D,
    report_to_files,
    run_window,
    spectrum_upper_audit,
    structure_function,
    time_average,
    tv_audit,
)

__all__ = [
    "ConfigError",
    "CoverageError",
    "DiscontinuityWarning",
    "DomainError",
    "FlatnessError",
    "InstabilityError",
    "NumericsError",
    "ResolutionWarning",
    "SpanError",
    "PeriodicField",
    "project_zero_mean",
    "from_function",
    "sine_field",
    "ramp_field",
    "read_binary",
    "read_binary_sequence",
    "write_binary_sequence",
    "FluxModel",
    "make_flux",
    "flux_eval",
    "convexity_bound",
    "inverse_slope",
    "legendre",
    "HeatPotential",
    "heat_potential",
    "solve_classical",
    "InviscidSolution",
    "characteristics_eval",
    "lax_oleinik_eval",
    "robust_slopes",
    "shock_time",
    "solve_inviscid",
    "RunConfig",
    "StepStats",
    "Trajectory",
    "config_hash",
    "energy_balance_residual",
    "integrate",
    "resolution_floor",
    "seeded_initial",
    "stable_dt",
    "trajectory_to_files",
    "load_trajectory",
    "run_cached",
    "save_trajectory",
    "DiagnosticsReport",
    "RangeSpec",
    "SnapshotClass",
    "WindowSpec",
    "amplitude_audit",
    "averaging_window",
    "calibrate_K",
    "classify_snapshot",
    "cliff_profile",
    "diagnose",
    "energy_spectrum",
    "estimate_C_tilde",
    "flatness",
    "lk_fraction",
    "oleinik_audit",
    "positive_increment_average",
    "quantity_D",
    "report_to_files",
    "run_window",
    "spectrum_upper_audit",
    "structure_function",
    "time_average",
    "tv_audit",
    "INVISCID_N_OUT",
    "INVISCID_SEED",
    "INVISCID_U0_GRID",
    "MINI_NU_LIST",
    "SUITE_CFL",
    "SUITE_NU_LIST",
    "SUITE_SEEDS",
    "ScalingFit",
    "SweepBase",
    "SweepResult",
    "exponent_report",
    "fit_loglog",
    "fixed_ratio_ell",
    "inviscid_report",
    "inviscid_suite_inputs",
    "inviscid_t_list",
    "lo_sequence",
    "mini_config",
    "predicted_gamma",
    "predicted_zeta",
    "suite_config",
    "suite_ell_grid",
    "sweep_nu",
    "trimmed_j1",
    "trimmed_j2",
    "write_fits_csv",
    "__version__",
]
