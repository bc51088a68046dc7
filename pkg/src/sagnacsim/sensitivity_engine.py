"""Phase-sensitivity estimation on top of the interferometer model.

The estimator is plain intensity error propagation: the phase variance is the
detected photon-number variance divided by the squared slope of the detected
mean versus the working phase. The model applies +phi and -phi to the two
directions, so raw estimates live in a half-phase convention; multiplying
variance-type quantities by HALF_TO_FULL_PHASE_VARIANCE (exactly 4) moves
them to the single differential-phase convention the analytic track uses.
calibrate_kappa measures that factor rather than assuming it.
"""

from __future__ import annotations

import math
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from . import gaussian_core as gc
from .closed_form import ph_sensitivity
from .errors import CalibrationError, NoOptimumError
from .sagnac_model import Scenario, build_and_run

# Variance ratio between the full differential-phase convention and the
# +phi/-phi split used inside the loop model. A phase difference 2*phi means
# d<N>/dphi is twice the full-convention slope, so variances divide by 4.
HALF_TO_FULL_PHASE_VARIANCE = 4.0

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class FdOptions:
    """Finite-difference controls for the mean-intensity slope.

    step None selects the adaptive rule max(1e-6, 1e-4*|phi|). richardson
    adds one extrapolation level on top of the central difference. Slopes
    smaller than singular_threshold (photons per radian) mark the point as
    stationary and the variance estimate becomes +infinity.
    """

    step: float | None = None
    richardson: bool = True
    singular_threshold: float = 1e-12

    def __post_init__(self):
        if self.step is not None and not (math.isfinite(self.step) and self.step > 0.0):
            raise ValueError(f"step must be positive, got {self.step}")
        if not (math.isfinite(self.singular_threshold) and self.singular_threshold >= 0.0):
            raise ValueError("singular_threshold must be finite and >= 0")

    def step_at(self, phi: float) -> float:
        if self.step is not None:
            return self.step
        return max(1e-6, 1e-4 * abs(phi))


@dataclass(frozen=True)
class SensitivityPoint:
    phi: float
    mean_n: float
    var_n: float
    dmean_dphi: float
    delta2phi: float
    snl: float
    ratio: float
    ratio_db: float


@dataclass(frozen=True)
class SensitivityCurve:
    scenario: Scenario
    points: tuple[SensitivityPoint, ...]
    kappa_applied: float


@dataclass(frozen=True)
class OptimumResult:
    phi_star: float
    point: SensitivityPoint
    at_boundary: bool


def _detected_mean(scenario: Scenario, phi: float) -> float:
    rep = build_and_run(scenario, phi)
    return gc.photon_moments(rep.detector_state, rep.measured_modes).mean_n


def _slope(scenario: Scenario, phi: float, fd: FdOptions) -> float:
    h = fd.step_at(phi)
    d_h = (_detected_mean(scenario, phi + h) - _detected_mean(scenario, phi - h)) / (2.0 * h)
    if not fd.richardson:
        return d_h
    h2 = 0.5 * h
    d_h2 = (_detected_mean(scenario, phi + h2) - _detected_mean(scenario, phi - h2)) / (2.0 * h2)
    return (4.0 * d_h2 - d_h) / 3.0


def _reference_photon_number(scenario: Scenario, rep) -> float:
    """Shot-noise normalizer per the scenario's convention."""
    n_ref = rep.n_in
    if scenario.snl_convention == "numeric_nin":
        n_ref *= scenario.loop_loss.total_transmission * scenario.detector_efficiency
    if n_ref <= 0.0:
        raise ValueError(
            "shot-noise reference needs circulating photons; got n_ref = " f"{n_ref}"
        )
    return n_ref


def estimate(
    scenario: Scenario,
    phi: float,
    fd: FdOptions | None = None,
    kappa: float = 1.0,
) -> SensitivityPoint:
    """One sensitivity point; kappa scales delta2phi and snl (ratio is kappa-free)."""
    fd = FdOptions() if fd is None else fd
    if not (math.isfinite(kappa) and kappa > 0.0):
        raise ValueError(f"kappa must be positive, got {kappa}")
    rep = build_and_run(scenario, phi)
    mom = gc.photon_moments(rep.detector_state, rep.measured_modes)
    slope = _slope(scenario, phi, fd)
    if abs(slope) < fd.singular_threshold:
        delta2 = math.inf
    else:
        delta2 = mom.var_n / slope**2 * kappa
    snl = kappa / (4.0 * _reference_photon_number(scenario, rep))
    ratio = delta2 / snl
    ratio_db = 10.0 * math.log10(ratio) if math.isfinite(ratio) else math.inf
    return SensitivityPoint(
        phi=float(phi),
        mean_n=mom.mean_n,
        var_n=mom.var_n,
        dmean_dphi=slope,
        delta2phi=delta2,
        snl=snl,
        ratio=ratio,
        ratio_db=ratio_db,
    )


def sweep(
    scenario: Scenario,
    phi_grid,
    fd: FdOptions | None = None,
    kappa: float = HALF_TO_FULL_PHASE_VARIANCE,
    threads: int | None = None,
) -> SensitivityCurve:
    """Evaluate a strictly increasing phase grid; infinities are kept in place."""
    grid = [float(p) for p in phi_grid]
    if not grid:
        raise ValueError("phase grid is empty")
    if any(not math.isfinite(p) for p in grid):
        raise ValueError("phase grid must be finite")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("phase grid must be strictly increasing")

    def point(p: float) -> SensitivityPoint:
        try:
            return estimate(scenario, p, fd=fd, kappa=kappa)
        except Exception as exc:
            head = str(exc.args[0]) if exc.args else exc.__class__.__name__
            exc.args = (f"at phi={p!r}: {head}",) + tuple(exc.args[1:])
            raise
    if threads is not None and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            points = tuple(pool.map(point, grid))
    else:
        points = tuple(point(p) for p in grid)
    return SensitivityCurve(scenario=scenario, points=points, kappa_applied=kappa)


def find_optimum(
    scenario: Scenario,
    phi_interval: tuple[float, float],
    fd: FdOptions | None = None,
    grid_points: int = 48,
) -> OptimumResult:
    """Locate the working phase minimizing delta2phi inside phi_interval.

    A log-spaced scan brackets the minimum and golden-section refinement
    polishes it. An optimum pinned to an interval edge (a monotone curve) is
    returned with at_boundary set rather than treated as an error.
    """
    lo, hi = float(phi_interval[0]), float(phi_interval[1])
    if not (0.0 < lo < hi < math.pi / 2):
        raise ValueError(f"phi_interval must satisfy 0 < lo < hi < pi/2, got {phi_interval}")
    if grid_points < 4:
        raise ValueError("grid_points must be at least 4")
    ratio_step = (hi / lo) ** (1.0 / (grid_points - 1))
    grid = [lo * ratio_step**k for k in range(grid_points)]
    grid[-1] = hi

    def objective(p: float) -> float:
        return estimate(scenario, p, fd=fd, kappa=HALF_TO_FULL_PHASE_VARIANCE).delta2phi

    values = [objective(p) for p in grid]
    if all(math.isinf(v) for v in values):
        raise NoOptimumError("delta2phi is infinite over the whole interval")
    i_min = min(range(len(grid)), key=lambda i: values[i])
    a = grid[max(i_min - 1, 0)]
    b = grid[min(i_min + 1, len(grid) - 1)]
    # golden-section shrink of the bracketing cell pair
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = objective(x1), objective(x2)
    for _ in range(80):
        if b - a <= 1e-12 * max(1.0, b):
            break
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = objective(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = objective(x2)
    phi_star = x1 if f1 <= f2 else x2
    point = estimate(scenario, phi_star, fd=fd, kappa=HALF_TO_FULL_PHASE_VARIANCE)
    at_boundary = phi_star <= lo * 1.001 or phi_star >= hi * 0.999
    return OptimumResult(phi_star=phi_star, point=point, at_boundary=at_boundary)


def calibrate_kappa(
    reference_set,
    fd: FdOptions | None = None,
) -> tuple[float, float]:
    """Measure the half-to-full convention factor against the analytic track.

    reference_set is a list of (scenario, phi) pairs. Each scenario must be a
    lossless, balanced (g_m = g), seeded, degenerate parametric-homodyne
    configuration, the regime where the analytic expression holds. Returns
    (kappa, max_rel_deviation); a spread of 0.5% or more raises
    CalibrationError since the factor must be a pure convention constant.
    """
    pairs = list(reference_set)
    if not pairs:
        raise ValueError("reference set is empty")
    ratios = []
    for scenario, phi in pairs:
        if not isinstance(scenario, Scenario):
            raise ValueError("reference set entries must be (Scenario, phi) pairs")
        if scenario.model != "degenerate" or scenario.detection != "parametric_homodyne":
            raise ValueError("calibration needs degenerate parametric-homodyne scenarios")
        if scenario.g_m != scenario.g:
            raise ValueError("calibration needs balanced gain (g_m = g)")
        if scenario.loop_loss.total_transmission != 1.0 or scenario.detector_efficiency != 1.0:
            raise ValueError("calibration needs lossless scenarios")
        alpha2 = abs(scenario.seed) ** 2
        if alpha2 == 0.0:
            raise ValueError("calibration needs seeded scenarios")
        closed = ph_sensitivity(scenario.g, alpha2, phi)
        numeric = estimate(scenario, phi, fd=fd, kappa=1.0).delta2phi
        if not (math.isfinite(numeric) and numeric > 0.0):
            raise CalibrationError(f"numeric delta2phi unusable at phi={phi}: {numeric}")
        ratios.append(closed / numeric)
    kappa = statistics.median(ratios)
    max_rel_dev = max(abs(r / kappa - 1.0) for r in ratios)
    if max_rel_dev >= 0.005:
        raise CalibrationError(
            f"kappa spread {max_rel_dev:.3%} across the reference set; "
            "convention factor is not constant, indicating a modeling bug"
        )
    return kappa, max_rel_dev
