"""Interferometer pipeline builder for rotation sensing with loop amplifiers.

A seed enters a Sagnac loop through a balanced beamsplitter, both directions
pass a phase-sensitive amplifier inside the loop, pick up opposite rotation
phases +phi and -phi, suffer optional pre- and post-amplifier losses, and
recombine on the same beamsplitter. Detection reads the dark port directly or
after a measurement amplifier. The degenerate model uses one field per
direction (2 modes); the nondegenerate model propagates signal and idler
pairs (4 modes).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import gaussian_core as gc
from .errors import NumericalFailure

MODELS = ("degenerate", "nondegenerate")
DETECTIONS = ("direct", "parametric_homodyne")
PLACEMENTS = ("symmetric", "opa_at_bs", "custom")
MEASURED_MODES = ("signal", "idler", "both")
SNL_CONVENTIONS = ("lossless_nin", "numeric_nin")


@dataclass(frozen=True)
class LoopLossSpec:
    """Round-trip loop loss and where it sits relative to the amplifier.

    total_transmission is the round-trip power transmission per beam.
    symmetric splits it evenly before and after the amplifier; opa_at_bs puts
    the clockwise beam's loss entirely after the amplifier (and the
    counter-clockwise beam's entirely before it); custom splits the clockwise
    pre-amplifier share as total_transmission**cw_pre_fraction.
    """

    total_transmission: float = 1.0
    placement: str = "symmetric"
    cw_pre_fraction: float | None = None

    def __post_init__(self):
        if not 0.0 < self.total_transmission <= 1.0:
            raise ValueError(
                f"total_transmission must lie in (0, 1], got {self.total_transmission}"
            )
        if self.placement not in PLACEMENTS:
            raise ValueError(f"placement must be one of {PLACEMENTS}, got {self.placement!r}")
        if self.placement == "custom":
            f = self.cw_pre_fraction
            if f is None or not 0.0 <= f <= 1.0:
                raise ValueError("custom placement needs cw_pre_fraction in [0, 1]")
        elif self.cw_pre_fraction is not None:
            raise ValueError("cw_pre_fraction only applies to custom placement")

    def arm_transmissions(self) -> tuple[float, float, float, float]:
        """(cw_pre, cw_post, ccw_pre, ccw_post) power transmissions."""
        eta = self.total_transmission
        if self.placement == "symmetric":
            f = 0.5
        elif self.placement == "opa_at_bs":
            f = 0.0
        else:
            f = float(self.cw_pre_fraction)
        return eta**f, eta ** (1.0 - f), eta ** (1.0 - f), eta**f


@dataclass(frozen=True)
class Scenario:
    """One interferometer configuration.

    seed is a single complex amplitude for the degenerate model, or a
    (signal, idler) pair for the nondegenerate one. g_m defaults to g.
    measured_modes selects which dark-port outputs the detector reads and is
    ignored by the degenerate model, which has a single dark port.
    """

    model: str
    detection: str
    g: float
    g_m: float | None = None
    pump_phase_loop: float = 0.0
    pump_phase_meas: float = math.pi
    seed: complex | tuple[complex, complex] = 0j
    loop_loss: LoopLossSpec = field(default_factory=LoopLossSpec)
    detector_efficiency: float = 1.0
    measured_modes: str = "both"
    snl_convention: str = "lossless_nin"

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError(f"model must be one of {MODELS}, got {self.model!r}")
        if self.detection not in DETECTIONS:
            raise ValueError(f"detection must be one of {DETECTIONS}, got {self.detection!r}")
        if not (isinstance(self.g, (int, float)) and math.isfinite(self.g) and self.g >= 0):
            raise ValueError(f"loop gain must be finite and >= 0, got {self.g}")
        g_m = self.g if self.g_m is None else self.g_m
        if not (isinstance(g_m, (int, float)) and math.isfinite(g_m) and g_m >= 0):
            raise ValueError(f"measurement gain must be finite and >= 0, got {self.g_m}")
        if not 0.0 <= self.detector_efficiency <= 1.0:
            raise ValueError(
                f"detector_efficiency must lie in [0, 1], got {self.detector_efficiency}"
            )
        if self.measured_modes not in MEASURED_MODES:
            raise ValueError(
                f"measured_modes must be one of {MEASURED_MODES}, got {self.measured_modes!r}"
            )
        if self.snl_convention not in SNL_CONVENTIONS:
            raise ValueError(
                f"snl_convention must be one of {SNL_CONVENTIONS}, got {self.snl_convention!r}"
            )
        if not isinstance(self.loop_loss, LoopLossSpec):
            raise ValueError("loop_loss must be a LoopLossSpec")
        if self.model == "degenerate":
            if isinstance(self.seed, (tuple, list)):
                raise ValueError("degenerate model takes a single seed amplitude")
            seed = complex(self.seed)
            if seed.imag != 0.0:
                warnings.warn(
                    "analytic expressions assume a real seed amplitude; "
                    "the imaginary part is retained",
                    stacklevel=3,
                )
        else:
            if not (isinstance(self.seed, (tuple, list)) and len(self.seed) == 2):
                raise ValueError("nondegenerate model takes a (signal, idler) seed pair")
            seed = (complex(self.seed[0]), complex(self.seed[1]))
            if seed[0].imag != 0.0 or seed[1].imag != 0.0:
                warnings.warn(
                    "analytic expressions assume real seed amplitudes; "
                    "imaginary parts are retained",
                    stacklevel=3,
                )
        object.__setattr__(self, "g", float(self.g))
        object.__setattr__(self, "g_m", float(g_m))
        object.__setattr__(self, "pump_phase_loop", float(self.pump_phase_loop))
        object.__setattr__(self, "pump_phase_meas", float(self.pump_phase_meas))
        object.__setattr__(self, "detector_efficiency", float(self.detector_efficiency))
        object.__setattr__(self, "seed", seed)

    @property
    def num_modes(self) -> int:
        return 2 if self.model == "degenerate" else 4


@dataclass(frozen=True)
class PipelinePlan:
    """Ordered channel list realizing a scenario at one working phase.

    Steps are (op, params) pairs over {displace, beamsplitter, loss,
    single_squeezer, two_mode_squeezer, phase}. loop_end indexes the step
    after which the loop content is complete but not yet recombined;
    recombine_end indexes the step after the final recombining beamsplitter.
    """

    num_modes: int
    steps: tuple[tuple[str, dict], ...]
    loop_end: int
    recombine_end: int
    dark_modes: tuple[int, ...]
    bright_modes: tuple[int, ...]
    measured_modes: tuple[int, ...]


@dataclass(frozen=True, eq=False)
class DetectionReport:
    """What the detector sees, plus bookkeeping states.

    n_in is the total mean photon number inside the loop just before
    recombination for the lossless variant of the scenario, the shot-noise
    normalizer. n_in_lossy reports the same quantity with losses applied, as a
    diagnostic. dark_port_state and bright_port_state are reduced states taken
    right after recombination, before any measurement amplifier or detection
    loss; detector_state is the full final state.
    """

    detector_state: gc.GaussianState
    measured_modes: tuple[int, ...]
    n_in: float
    n_in_lossy: float
    dark_port_state: gc.GaussianState
    bright_port_state: gc.GaussianState


def _measured_mode_set(scenario: Scenario) -> tuple[int, ...]:
    if scenario.model == "degenerate":
        return (1,)
    return {"signal": (2,), "idler": (3,), "both": (2, 3)}[scenario.measured_modes]


def plan_pipeline(scenario: Scenario, phi: float, include_loss: bool = True) -> PipelinePlan:
    """Lay out the channel sequence for one run; shared by all engine tracks."""
    if not (isinstance(phi, (int, float)) and math.isfinite(phi)):
        raise ValueError(f"working phase must be finite, got {phi}")
    phi = float(phi)
    if include_loss:
        cw_pre, cw_post, ccw_pre, ccw_post = scenario.loop_loss.arm_transmissions()
        eta_d = scenario.detector_efficiency
    else:
        cw_pre = cw_post = ccw_pre = ccw_post = 1.0
        eta_d = 1.0
    steps: list[tuple[str, dict]] = []

    def loss(mode: int, eta: float) -> None:
        if eta < 1.0:
            steps.append(("loss", {"mode": mode, "eta": eta}))

    measured = _measured_mode_set(scenario)
    if scenario.model == "degenerate":
        num_modes = 2
        cw, ccw = [0], [1]
        alpha = scenario.seed
        steps.append(("displace", {"mode": 0, "alpha_re": alpha.real, "alpha_im": alpha.imag}))
        steps.append(("beamsplitter", {"mode_a": 0, "mode_b": 1}))
        for m in cw:
            loss(m, cw_pre)
        for m in ccw:
            loss(m, ccw_pre)
        for m in (0, 1):
            steps.append(
                (
                    "single_squeezer",
                    {"mode": m, "g": scenario.g, "pump_phase": scenario.pump_phase_loop},
                )
            )
        steps.append(("phase", {"mode": 0, "theta": phi}))
        steps.append(("phase", {"mode": 1, "theta": -phi}))
        for m in cw:
            loss(m, cw_post)
        for m in ccw:
            loss(m, ccw_post)
        loop_end = len(steps)
        steps.append(("beamsplitter", {"mode_a": 1, "mode_b": 0}))
        recombine_end = len(steps)
        dark, bright = (1,), (0,)
        if scenario.detection == "parametric_homodyne":
            steps.append(
                (
                    "single_squeezer",
                    {"mode": 1, "g": scenario.g_m, "pump_phase": scenario.pump_phase_meas},
                )
            )
    else:
        # modes: 0 = cw signal, 1 = cw idler, 2 = ccw signal, 3 = ccw idler
        num_modes = 4
        cw, ccw = [0, 1], [2, 3]
        alpha_s, alpha_i = scenario.seed
        steps.append(("displace", {"mode": 0, "alpha_re": alpha_s.real, "alpha_im": alpha_s.imag}))
        steps.append(("displace", {"mode": 1, "alpha_re": alpha_i.real, "alpha_im": alpha_i.imag}))
        steps.append(("beamsplitter", {"mode_a": 0, "mode_b": 2}))
        steps.append(("beamsplitter", {"mode_a": 1, "mode_b": 3}))
        for m in cw:
            loss(m, cw_pre)
        for m in ccw:
            loss(m, ccw_pre)
        for pair in ((0, 1), (2, 3)):
            steps.append(
                (
                    "two_mode_squeezer",
                    {
                        "mode_a": pair[0],
                        "mode_b": pair[1],
                        "g": scenario.g,
                        "pump_phase": scenario.pump_phase_loop,
                    },
                )
            )
        # the rotation phase is a pair phase: signal and idler acquire it alike
        for m in cw:
            steps.append(("phase", {"mode": m, "theta": phi}))
        for m in ccw:
            steps.append(("phase", {"mode": m, "theta": -phi}))
        for m in cw:
            loss(m, cw_post)
        for m in ccw:
            loss(m, ccw_post)
        loop_end = len(steps)
        steps.append(("beamsplitter", {"mode_a": 2, "mode_b": 0}))
        steps.append(("beamsplitter", {"mode_a": 3, "mode_b": 1}))
        recombine_end = len(steps)
        dark, bright = (2, 3), (0, 1)
        if scenario.detection == "parametric_homodyne":
            steps.append(
                (
                    "two_mode_squeezer",
                    {
                        "mode_a": 2,
                        "mode_b": 3,
                        "g": scenario.g_m,
                        "pump_phase": scenario.pump_phase_meas,
                    },
                )
            )
    for m in measured:
        loss(m, eta_d)
    return PipelinePlan(
        num_modes=num_modes,
        steps=tuple(steps),
        loop_end=loop_end,
        recombine_end=recombine_end,
        dark_modes=dark,
        bright_modes=bright,
        measured_modes=measured,
    )


def apply_plan_step(state: gc.GaussianState, op: str, params: dict) -> gc.GaussianState:
    """Execute one PipelinePlan step on a Gaussian state."""
    if op == "displace":
        return gc.displace(state, params["mode"], params["alpha_re"], params["alpha_im"])
    if op == "beamsplitter":
        return gc.apply_beamsplitter(state, params["mode_a"], params["mode_b"])
    if op == "loss":
        return gc.apply_loss(state, params["mode"], params["eta"])
    if op == "single_squeezer":
        return gc.apply_single_mode_squeezer(
            state, params["mode"], params["g"], params["pump_phase"]
        )
    if op == "two_mode_squeezer":
        return gc.apply_two_mode_squeezer(
            state, params["mode_a"], params["mode_b"], params["g"], params["pump_phase"]
        )
    if op == "phase":
        return gc.apply_phase(state, params["mode"], params["theta"])
    raise ValueError(f"unknown pipeline op {op!r}")


def loop_photon_number(scenario: Scenario) -> float:
    """Total mean photons inside the lossless loop just before recombination."""
    plan = plan_pipeline(scenario, 0.0, include_loss=False)
    state = gc.vacuum_state(plan.num_modes)
    for op, params in plan.steps[: plan.loop_end]:
        state = apply_plan_step(state, op, params)
    return gc.photon_moments(state, range(plan.num_modes)).mean_n


def build_and_run(scenario: Scenario, phi: float) -> DetectionReport:
    """Run the full pipeline at one working phase."""
    plan = plan_pipeline(scenario, phi, include_loss=True)
    state = gc.vacuum_state(plan.num_modes)
    loop_state = None
    recombined = None
    for i, (op, params) in enumerate(plan.steps):
        state = apply_plan_step(state, op, params)
        if i + 1 == plan.loop_end:
            loop_state = state
        if i + 1 == plan.recombine_end:
            recombined = state
    if not (np.all(np.isfinite(state.mean)) and np.all(np.isfinite(state.cov))):
        raise NumericalFailure(f"non-finite state in pipeline at phi={phi!r}")
    n_in_lossy = gc.photon_moments(loop_state, range(plan.num_modes)).mean_n
    return DetectionReport(
        detector_state=state,
        measured_modes=plan.measured_modes,
        n_in=loop_photon_number(scenario),
        n_in_lossy=n_in_lossy,
        dark_port_state=gc.reduce_state(recombined, plan.dark_modes),
        bright_port_state=gc.reduce_state(recombined, plan.bright_modes),
    )
