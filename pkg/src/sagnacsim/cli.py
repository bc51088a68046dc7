"""Command-line front end: configs in, CSV curve data and reports out.

Exit codes: 0 success, 2 config error, 3 numerical failure, 4 validation
failure. CSV layout is a frozen external contract:
phi,mean_intensity,var_intensity,dintensity_dphi,delta2phi,delta2phi_snl,ratio,ratio_db
with 12-significant-digit values and the literal `inf` at stationary points.
Every CSV gets a .meta.json sidecar carrying the resolved config, the kappa
applied, and the engine version, so any output can be reproduced exactly.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import __version__
from .config import grid_values, load_config, resolve_config, scenario_to_config
from .errors import ConfigError, NoOptimumError, NumericalFailure
from .fock_oracle import channel_test_cases, compare_channel, compare_pipeline, pipeline_test_cases
from .presets import get_preset
from .sagnac_model import Scenario
from .sensitivity_engine import (
    HALF_TO_FULL_PHASE_VARIANCE,
    calibrate_kappa,
    find_optimum,
    sweep,
)
from .tolerances import MOMENT_AGREEMENT_ATOL, PIPELINE_AGREEMENT_RTOL

CSV_HEADER = "phi,mean_intensity,var_intensity,dintensity_dphi,delta2phi,delta2phi_snl,ratio,ratio_db"

VALIDATE_LEVELS = ("channels", "pipelines", "analytic", "all")


def _fmt(x: float) -> str:
    if math.isinf(x):
        return "inf"
    return f"{x:.12g}"


def _curve_csv_text(curve) -> str:
    lines = [CSV_HEADER]
    for pt in curve.points:
        lines.append(
            ",".join(
                _fmt(v)
                for v in (
                    pt.phi,
                    pt.mean_n,
                    pt.var_n,
                    pt.dmean_dphi,
                    pt.delta2phi,
                    pt.snl,
                    pt.ratio,
                    pt.ratio_db,
                )
            )
        )
    return "\n".join(lines) + "\n"


def _meta_path(csv_path: Path) -> Path:
    name = csv_path.name
    if name.endswith(".csv"):
        name = name[: -len(".csv")]
    return csv_path.with_name(name + ".meta.json")


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def run_simulate(config_path: str, out_path: str, threads: int | None) -> int:
    scenario, grid, resolved = resolve_config(load_config(config_path))
    curve = sweep(
        scenario, grid_values(grid), kappa=HALF_TO_FULL_PHASE_VARIANCE, threads=threads
    )
    out = Path(out_path)
    if out.parent != Path(""):
        out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(_curve_csv_text(curve), encoding="utf-8")
    _write_json(
        _meta_path(out),
        {
            "engine_version": __version__,
            "kappa_applied": curve.kappa_applied,
            "config": resolved,
        },
    )
    print(f"wrote {out} ({len(curve.points)} points) and {_meta_path(out)}")
    return 0


def run_figure(preset_name: str, out_dir: str, threads: int | None) -> int:
    try:
        preset = get_preset(preset_name)
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    directory = Path(out_dir)
    directory.mkdir(parents=True, exist_ok=True)
    curve_configs = {}
    for label, scenario in preset.curves:
        curve = sweep(
            scenario,
            grid_values(preset.grid),
            kappa=HALF_TO_FULL_PHASE_VARIANCE,
            threads=threads,
        )
        path = directory / f"{preset.name}_{label}.csv"
        path.write_text(_curve_csv_text(curve), encoding="utf-8")
        curve_configs[label] = resolve_config(scenario_to_config(scenario, preset.grid))[2]
        print(f"wrote {path}")
    _write_json(
        directory / f"{preset.name}.meta.json",
        {
            "engine_version": __version__,
            "kappa_applied": HALF_TO_FULL_PHASE_VARIANCE,
            "preset": preset.name,
            "grid": dict(preset.grid),
            "curves": curve_configs,
        },
    )
    print(f"wrote {directory / (preset.name + '.meta.json')}")
    return 0


def _validate_channels(rows: list) -> None:
    for case in channel_test_cases():
        name = f"channel:{case.name}"
        try:
            rep = compare_channel(case.channel, case.params, case.input_spec, cutoff=case.cutoff)
        except Exception as exc:
            rows.append((name, False, f"{exc.__class__.__name__}: {exc}"))
            continue
        ok = (
            rep.abs_error_mean < MOMENT_AGREEMENT_ATOL
            and rep.abs_error_var < MOMENT_AGREEMENT_ATOL
        )
        rows.append(
            (
                name,
                ok,
                f"mean_err={rep.abs_error_mean:.2e} var_err={rep.abs_error_var:.2e} "
                f"tail={rep.tail_mass:.1e}",
            )
        )


def _validate_pipelines(rows: list) -> None:
    for case in pipeline_test_cases():
        name = f"pipeline:{case.name}"
        try:
            rep = compare_pipeline(case.scenario, case.phi, cutoff=case.cutoff)
        except Exception as exc:
            rows.append((name, False, f"{exc.__class__.__name__}: {exc}"))
            continue
        ok = (
            rep.rel_error_mean() < PIPELINE_AGREEMENT_RTOL
            and rep.rel_error_var() < PIPELINE_AGREEMENT_RTOL
        )
        rows.append(
            (
                name,
                ok,
                f"mean_rel={rep.rel_error_mean():.2e} var_rel={rep.rel_error_var():.2e} "
                f"tail={rep.tail_mass:.1e}",
            )
        )


def _validate_analytic(rows: list) -> None:
    reference = [
        (
            Scenario(
                model="degenerate",
                detection="parametric_homodyne",
                g=g,
                g_m=g,
                seed=complex(math.sqrt(n), 0.0),
            ),
            phi,
        )
        for g in (1.0, 2.0)
        for n in (10.0, 100.0)
        for phi in (1e-3, 1e-2, 1e-1)
    ]
    try:
        kappa, max_dev = calibrate_kappa(reference)
    except Exception as exc:
        rows.append(("analytic:kappa", False, f"{exc.__class__.__name__}: {exc}"))
        return
    ok = abs(kappa - 4.0) <= 0.02
    rows.append(("analytic:kappa", ok, f"kappa={kappa:.6f} max_rel_dev={max_dev:.2e}"))


def run_validate(level: str) -> int:
    rows: list[tuple[str, bool, str]] = []
    if level in ("channels", "all"):
        _validate_channels(rows)
    if level in ("pipelines", "all"):
        _validate_pipelines(rows)
    if level in ("analytic", "all"):
        _validate_analytic(rows)
    width = max(len(name) for name, _, _ in rows)
    for name, ok, detail in rows:
        print(f"{'PASS' if ok else 'FAIL'}  {name:<{width}}  {detail}")
    failures = [name for name, ok, _ in rows if not ok]
    print(f"{len(rows) - len(failures)}/{len(rows)} checks passed")
    if failures:
        print(f"validation failure: first failing case is {failures[0]}", file=sys.stderr)
        return 4
    return 0


def run_optimize(config_path: str, as_json: bool) -> int:
    scenario, grid, _resolved = resolve_config(load_config(config_path))
    try:
        result = find_optimum(scenario, (grid["start"], grid["stop"]))
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    payload = {
        "phi_star": result.phi_star,
        "delta2phi_min": result.point.delta2phi,
        "ratio_db_min": result.point.ratio_db,
        "at_boundary": result.at_boundary,
        "kappa_applied": HALF_TO_FULL_PHASE_VARIANCE,
    }
    if as_json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(f"phi_star      = {_fmt(result.phi_star)}")
        print(f"delta2phi_min = {_fmt(result.point.delta2phi)}")
        print(f"ratio_db_min  = {_fmt(result.point.ratio_db)}")
        print(f"at_boundary   = {str(result.at_boundary).lower()}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sagnacsim",
        description="Loop-amplifier interferometer sensitivity simulator",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="sweep a scenario config onto a CSV curve")
    p_sim.add_argument("--config", required=True, help="scenario config JSON")
    p_sim.add_argument("--out", required=True, help="output CSV path")
    p_sim.add_argument("--threads", type=int, default=None, help="parallel sweep workers")

    p_fig = sub.add_parser("figure", help="generate all CSV curves for a named preset")
    p_fig.add_argument("preset", help="preset name")
    p_fig.add_argument("--out", required=True, help="output directory")
    p_fig.add_argument("--threads", type=int, default=None, help="parallel sweep workers")

    p_val = sub.add_parser("validate", help="run oracle and analytic cross-checks")
    p_val.add_argument(
        "level", nargs="?", default="all", choices=VALIDATE_LEVELS, help="what to check"
    )

    p_opt = sub.add_parser("optimize", help="find the best working phase for a config")
    p_opt.add_argument("--config", required=True, help="scenario config JSON")
    p_opt.add_argument("--json", action="store_true", help="machine-readable output")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "simulate":
            return run_simulate(args.config, args.out, args.threads)
        if args.command == "figure":
            return run_figure(args.preset, args.out, args.threads)
        if args.command == "validate":
            return run_validate(args.level)
        if args.command == "optimize":
            return run_optimize(args.config, args.json)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except NoOptimumError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except (ValueError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    raise AssertionError(f"unhandled command {args.command!r}")


if __name__ == "__main__":
    sys.exit(main())
