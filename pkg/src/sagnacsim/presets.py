"""Frozen figure presets: named scenario families over a shared phase grid.

Each preset bundles the scenarios behind one published-style figure so the
CLI, the acceptance tests, and the plotting layer share a single source of
parameter truth. Regenerating a preset twice yields byte-identical CSV.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .sagnac_model import LoopLossSpec, Scenario

GRID = {"start": 1e-4, "stop": 0.5, "points": 81, "scale": "log"}


@dataclass(frozen=True)
class FigurePreset:
    name: str
    curves: tuple[tuple[str, Scenario], ...]
    grid: dict


def _ph(g: float, g_m: float | None = None, n_seed: float = 10.0, **kw) -> Scenario:
    return Scenario(
        model="degenerate",
        detection="parametric_homodyne",
        g=g,
        g_m=g if g_m is None else g_m,
        seed=complex(math.sqrt(n_seed), 0.0),
        **kw,
    )


def _dd(g: float, n_seed: float, **kw) -> Scenario:
    return Scenario(
        model="degenerate",
        detection="direct",
        g=g,
        seed=complex(math.sqrt(n_seed), 0.0),
        **kw,
    )


def _nd(detection: str, n_signal: float, n_idler: float, g: float, **kw) -> Scenario:
    return Scenario(
        model="nondegenerate",
        detection=detection,
        g=g,
        seed=(complex(math.sqrt(n_signal), 0.0), complex(math.sqrt(n_idler), 0.0)),
        **kw,
    )


def _loss(total: float, placement: str = "symmetric") -> LoopLossSpec:
    return LoopLossSpec(total_transmission=total, placement=placement)


def _build_presets() -> dict[str, FigurePreset]:
    presets = {}

    def add(name: str, curves) -> None:
        presets[name] = FigurePreset(name=name, curves=tuple(curves), grid=dict(GRID))

    # seeded amplified readout, gain family
    add("fig4a", [(f"g{int(round(10 * g)):02d}", _ph(g)) for g in (0.5, 1.0, 1.5, 2.0)])
    # measurement-gain robustness at fixed loop gain
    add("fig4b", [(f"gm{int(g_m)}", _ph(2.0, g_m=g_m)) for g_m in (2.0, 3.0, 4.0)])
    # symmetric loop loss family, power-equivalent shot-noise reference
    add(
        "fig5a",
        [
            ("lossless", _ph(2.0, n_seed=100.0, snl_convention="numeric_nin")),
            (
                "sym30",
                _ph(2.0, n_seed=100.0, loop_loss=_loss(0.7), snl_convention="numeric_nin"),
            ),
            (
                "sym99",
                _ph(2.0, n_seed=100.0, loop_loss=_loss(0.01), snl_convention="numeric_nin"),
            ),
        ],
    )
    # loss placement comparison
    add(
        "fig5b",
        [
            (
                label,
                _ph(
                    2.0,
                    n_seed=100.0,
                    loop_loss=_loss(total, placement),
                    snl_convention="numeric_nin",
                ),
            )
            for label, total, placement in (
                ("sym30", 0.7, "symmetric"),
                ("asym30", 0.7, "opa_at_bs"),
                ("sym99", 0.01, "symmetric"),
                ("asym99", 0.01, "opa_at_bs"),
            )
        ],
    )
    # direct detection seed saturation
    add(
        "fig6a",
        [
            (f"n1e{int(round(math.log10(n))):02d}", _dd(2.0, n))
            for n in (1e4, 1e6, 1e8, 1e10)
        ],
    )
    # direct detection under detector inefficiency
    add(
        "fig6b",
        [
            (
                f"eta{int(round(100 * eta))}",
                _dd(2.0, 1e10, detector_efficiency=eta, snl_convention="numeric_nin"),
            )
            for eta in (1.0, 0.9, 0.8, 0.7)
        ],
    )
    # seed distribution between signal and idler
    add(
        "s1",
        [
            ("single", _nd("direct", 1e10, 0.0, 2.0)),
            ("symmetric", _nd("direct", 5e9, 5e9, 2.0)),
        ],
    )
    # single-output readout, measurement gain retrieving the full enhancement
    add(
        "s2a",
        [
            ("gm2", _nd("parametric_homodyne", 5e9, 5e9, 2.0, g_m=2.0, measured_modes="signal")),
            ("gm3", _nd("parametric_homodyne", 5e9, 5e9, 2.0, g_m=3.0, measured_modes="signal")),
        ],
    )
    # dual-output readout, gain family
    add(
        "s2b",
        [
            (f"g{int(round(10 * g)):02d}", _nd("parametric_homodyne", 5.0, 5.0, g, g_m=g))
            for g in (0.7, 1.4, 2.0)
        ],
    )
    return presets


PRESETS: dict[str, FigurePreset] = _build_presets()

PRESET_NAMES = tuple(sorted(PRESETS))


def get_preset(name: str) -> FigurePreset:
    try:
        return PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; valid names: {', '.join(PRESET_NAMES)}")
