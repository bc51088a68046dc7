"""Strict JSON scenario-config schema: parse, validate, default, echo.

Every key is checked; unknown keys anywhere in the document are rejected with
the offending key named, since a silently ignored typo in a physics parameter
is the worst failure mode a tool like this can have. resolve_config returns
the Scenario, the phase grid, and a fully materialized echo of the config
(defaults included) whose round trip through resolve_config is the identity.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .errors import ConfigError
from .sagnac_model import (
    DETECTIONS,
    MEASURED_MODES,
    MODELS,
    SNL_CONVENTIONS,
    LoopLossSpec,
    Scenario,
)

_TOP_KEYS = (
    "model",
    "detection",
    "gain",
    "measurement_gain",
    "pump_phase_loop",
    "pump_phase_measurement",
    "seed",
    "loop_loss",
    "detector_efficiency",
    "measured_modes",
    "phase_grid",
    "snl_convention",
)


def load_config(path) -> dict:
    """Read a JSON config document from disk."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config document must be a JSON object")
    return doc


def _reject_unknown(doc: dict, allowed, context: str = "") -> None:
    for key in doc:
        if key not in allowed:
            path = f"{context}{key}"
            raise ConfigError(f"unknown config key `{path}`", key=path)


def _number(doc: dict, key: str, default=None, lo=None, hi=None, context: str = "") -> float:
    path = f"{context}{key}"
    if key not in doc:
        if default is None:
            raise ConfigError(f"missing required config key `{path}`", key=path)
        return float(default)
    value = doc[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"`{path}` must be a number, got {value!r}", key=path)
    value = float(value)
    if not math.isfinite(value):
        raise ConfigError(f"`{path}` must be finite, got {value}", key=path)
    if lo is not None and value < lo:
        raise ConfigError(f"`{path}` must be >= {lo}, got {value}", key=path)
    if hi is not None and value > hi:
        raise ConfigError(f"`{path}` must be <= {hi}, got {value}", key=path)
    return value


def _choice(doc: dict, key: str, options, default=None, context: str = "") -> str:
    path = f"{context}{key}"
    if key not in doc:
        if default is None:
            raise ConfigError(f"missing required config key `{path}`", key=path)
        return default
    value = doc[key]
    if value not in options:
        raise ConfigError(
            f"`{path}` must be one of {list(options)}, got {value!r}", key=path
        )
    return value


def _amplitude(doc: dict, key: str, context: str) -> complex:
    path = f"{context}{key}"
    value = doc.get(key, [0.0, 0.0])
    if (
        not isinstance(value, (list, tuple))
        or len(value) != 2
        or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in value)
    ):
        raise ConfigError(f"`{path}` must be a [re, im] pair of numbers", key=path)
    re, im = float(value[0]), float(value[1])
    if not (math.isfinite(re) and math.isfinite(im)):
        raise ConfigError(f"`{path}` must be finite", key=path)
    return complex(re, im)


def _resolve_seed(doc: dict, model: str):
    seed_doc = doc.get("seed", {})
    if not isinstance(seed_doc, dict):
        raise ConfigError("`seed` must be an object", key="seed")
    if model == "degenerate":
        _reject_unknown(seed_doc, ("alpha",), "seed.")
        alpha = _amplitude(seed_doc, "alpha", "seed.")
        return alpha, {"alpha": [alpha.real, alpha.imag]}
    _reject_unknown(seed_doc, ("alpha_signal", "alpha_idler"), "seed.")
    a_s = _amplitude(seed_doc, "alpha_signal", "seed.")
    a_i = _amplitude(seed_doc, "alpha_idler", "seed.")
    return (a_s, a_i), {
        "alpha_signal": [a_s.real, a_s.imag],
        "alpha_idler": [a_i.real, a_i.imag],
    }


def _resolve_loop_loss(doc: dict):
    loss_doc = doc.get("loop_loss", {})
    if not isinstance(loss_doc, dict):
        raise ConfigError("`loop_loss` must be an object", key="loop_loss")
    _reject_unknown(loss_doc, ("total_transmission", "placement"), "loop_loss.")
    total = _number(loss_doc, "total_transmission", default=1.0, context="loop_loss.")
    if not 0.0 < total <= 1.0:
        raise ConfigError(
            f"`loop_loss.total_transmission` must lie in (0, 1], got {total}",
            key="loop_loss.total_transmission",
        )
    placement = loss_doc.get("placement", "symmetric")
    if isinstance(placement, dict):
        _reject_unknown(placement, ("cw_pre_fraction",), "loop_loss.placement.")
        frac = _number(
            placement, "cw_pre_fraction", lo=0.0, hi=1.0, context="loop_loss.placement."
        )
        spec = LoopLossSpec(
            total_transmission=total, placement="custom", cw_pre_fraction=frac
        )
        echo = {"total_transmission": total, "placement": {"cw_pre_fraction": frac}}
    elif placement in ("symmetric", "opa_at_bs"):
        spec = LoopLossSpec(total_transmission=total, placement=placement)
        echo = {"total_transmission": total, "placement": placement}
    else:
        raise ConfigError(
            "`loop_loss.placement` must be \"symmetric\", \"opa_at_bs\", or an object "
            f"{{\"cw_pre_fraction\": f}}, got {placement!r}",
            key="loop_loss.placement",
        )
    return spec, echo


def _resolve_grid(doc: dict) -> dict:
    if "phase_grid" not in doc:
        raise ConfigError("missing required config key `phase_grid`", key="phase_grid")
    grid_doc = doc["phase_grid"]
    if not isinstance(grid_doc, dict):
        raise ConfigError("`phase_grid` must be an object", key="phase_grid")
    _reject_unknown(grid_doc, ("start", "stop", "points", "scale"), "phase_grid.")
    start = _number(grid_doc, "start", context="phase_grid.")
    stop = _number(grid_doc, "stop", context="phase_grid.")
    points = grid_doc.get("points")
    if isinstance(points, bool) or not isinstance(points, int) or points < 1:
        raise ConfigError(
            f"`phase_grid.points` must be an integer >= 1, got {points!r}",
            key="phase_grid.points",
        )
    scale = _choice(grid_doc, "scale", ("linear", "log"), default="log", context="phase_grid.")
    if stop <= start:
        raise ConfigError(
            f"`phase_grid.stop` must exceed start, got start={start} stop={stop}",
            key="phase_grid.stop",
        )
    if scale == "log" and start <= 0.0:
        raise ConfigError(
            f"log-scaled `phase_grid.start` must be > 0, got {start}",
            key="phase_grid.start",
        )
    return {"start": start, "stop": stop, "points": points, "scale": scale}


def resolve_config(doc: dict) -> tuple[Scenario, dict, dict]:
    """Validate a config document; return (scenario, grid, resolved echo)."""
    if not isinstance(doc, dict):
        raise ConfigError("config document must be a JSON object")
    _reject_unknown(doc, _TOP_KEYS)
    model = _choice(doc, "model", MODELS)
    detection = _choice(doc, "detection", DETECTIONS)
    gain = _number(doc, "gain", lo=0.0)
    g_m = _number(doc, "measurement_gain", default=gain, lo=0.0)
    pump_loop = _number(doc, "pump_phase_loop", default=0.0)
    pump_meas = _number(doc, "pump_phase_measurement", default=math.pi)
    seed, seed_echo = _resolve_seed(doc, model)
    loop_loss, loss_echo = _resolve_loop_loss(doc)
    eta_d = _number(doc, "detector_efficiency", default=1.0, lo=0.0, hi=1.0)
    measured = _choice(doc, "measured_modes", MEASURED_MODES, default="both")
    grid = _resolve_grid(doc)
    snl_conv = _choice(doc, "snl_convention", SNL_CONVENTIONS, default="lossless_nin")
    try:
        scenario = Scenario(
            model=model,
            detection=detection,
            g=gain,
            g_m=g_m,
            pump_phase_loop=pump_loop,
            pump_phase_meas=pump_meas,
            seed=seed,
            loop_loss=loop_loss,
            detector_efficiency=eta_d,
            measured_modes=measured,
            snl_convention=snl_conv,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    resolved = {
        "model": model,
        "detection": detection,
        "gain": gain,
        "measurement_gain": g_m,
        "pump_phase_loop": pump_loop,
        "pump_phase_measurement": pump_meas,
        "seed": seed_echo,
        "loop_loss": loss_echo,
        "detector_efficiency": eta_d,
        "measured_modes": measured,
        "phase_grid": grid,
        "snl_convention": snl_conv,
    }
    return scenario, grid, resolved


def scenario_to_config(scenario: Scenario, grid: dict) -> dict:
    """Materialize a config document reproducing (scenario, grid)."""
    if scenario.model == "degenerate":
        seed_echo = {"alpha": [scenario.seed.real, scenario.seed.imag]}
    else:
        a_s, a_i = scenario.seed
        seed_echo = {
            "alpha_signal": [a_s.real, a_s.imag],
            "alpha_idler": [a_i.real, a_i.imag],
        }
    loss = scenario.loop_loss
    if loss.placement == "custom":
        placement_echo = {"cw_pre_fraction": loss.cw_pre_fraction}
    else:
        placement_echo = loss.placement
    doc = {
        "model": scenario.model,
        "detection": scenario.detection,
        "gain": scenario.g,
        "measurement_gain": scenario.g_m,
        "pump_phase_loop": scenario.pump_phase_loop,
        "pump_phase_measurement": scenario.pump_phase_meas,
        "seed": seed_echo,
        "loop_loss": {
            "total_transmission": loss.total_transmission,
            "placement": placement_echo,
        },
        "detector_efficiency": scenario.detector_efficiency,
        "measured_modes": scenario.measured_modes,
        "phase_grid": dict(grid),
        "snl_convention": scenario.snl_convention,
    }
    return doc


def grid_values(grid: dict) -> list[float]:
    """Expand a phase grid document into its ordered phase list."""
    start, stop, points = grid["start"], grid["stop"], grid["points"]
    if grid["scale"] == "log":
        values = np.geomspace(start, stop, points)
    else:
        values = np.linspace(start, stop, points)
    return [float(v) for v in values]
