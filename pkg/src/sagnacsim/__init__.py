"""Gaussian-state simulator for loop-amplifier rotation interferometers.

Three independent tracks cross-check each other: a covariance-matrix engine
(gaussian_core + sagnac_model + sensitivity_engine), literal analytic
expressions (closed_form), and a truncated-Fock brute force (fock_oracle).
The cli module exposes them as the `sagnacsim` command.
"""

__version__ = "0.1.0"

from .closed_form import (
    ClosedFormResult,
    dd_sensitivity_exact,
    dd_sensitivity_small_phase,
    detector_ratio,
    evaluate,
    loss_ratio,
    nondeg_dd_limit,
    ph_ratio_min,
    ph_ratio_min_large_g,
    ph_sensitivity,
    seed_threshold,
    snl,
)
from .errors import (
    CalibrationError,
    ConfigError,
    CutoffTooSmallError,
    NoOptimumError,
    NumericalFailure,
    ResourceLimitError,
)
from .fock_oracle import (
    DiscrepancyReport,
    FockDensityMatrix,
    compare_channel,
    compare_pipeline,
    fock_apply_channel,
)
from .gaussian_core import (
    VACUUM_VARIANCE,
    GaussianState,
    MomentReport,
    apply_beamsplitter,
    apply_loss,
    apply_phase,
    apply_single_mode_squeezer,
    apply_two_mode_squeezer,
    displace,
    photon_moments,
    reduce_state,
    symplectic_eigenvalues,
    vacuum_state,
)
from .config import grid_values, load_config, resolve_config, scenario_to_config
from .presets import PRESET_NAMES, PRESETS, FigurePreset, get_preset
from .sagnac_model import (
    DetectionReport,
    LoopLossSpec,
    PipelinePlan,
    Scenario,
    build_and_run,
    loop_photon_number,
    plan_pipeline,
)
from .sensitivity_engine import (
    HALF_TO_FULL_PHASE_VARIANCE,
    FdOptions,
    OptimumResult,
    SensitivityCurve,
    SensitivityPoint,
    calibrate_kappa,
    estimate,
    find_optimum,
    sweep,
)

__all__ = [
    "__version__",
    "VACUUM_VARIANCE",
    "HALF_TO_FULL_PHASE_VARIANCE",
    "GaussianState",
    "MomentReport",
    "vacuum_state",
    "displace",
    "apply_phase",
    "apply_beamsplitter",
    "apply_single_mode_squeezer",
    "apply_two_mode_squeezer",
    "apply_loss",
    "photon_moments",
    "symplectic_eigenvalues",
    "reduce_state",
    "Scenario",
    "LoopLossSpec",
    "PipelinePlan",
    "DetectionReport",
    "plan_pipeline",
    "build_and_run",
    "loop_photon_number",
    "ClosedFormResult",
    "evaluate",
    "dd_sensitivity_exact",
    "dd_sensitivity_small_phase",
    "seed_threshold",
    "snl",
    "ph_sensitivity",
    "ph_ratio_min",
    "ph_ratio_min_large_g",
    "loss_ratio",
    "detector_ratio",
    "load_config",
    "resolve_config",
    "scenario_to_config",
    "grid_values",
    "nondeg_dd_limit",
    "FdOptions",
    "SensitivityPoint",
    "SensitivityCurve",
    "OptimumResult",
    "estimate",
    "sweep",
    "find_optimum",
    "calibrate_kappa",
    "FockDensityMatrix",
    "DiscrepancyReport",
    "fock_apply_channel",
    "compare_channel",
    "compare_pipeline",
    "FigurePreset",
    "PRESETS",
    "PRESET_NAMES",
    "get_preset",
    "NumericalFailure",
    "CutoffTooSmallError",
    "ResourceLimitError",
    "CalibrationError",
    "NoOptimumError",
    "ConfigError",
]
