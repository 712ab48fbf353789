"""Batch command-line front end.

One subcommand per invocation; every run writes its artifacts plus a
``manifest.json`` into ``--out``.  Configs come from ``--config PATH`` or a
named preset (``--preset NAME``, resolved in the installed ``presets/``
directory or ``$MAGTRAP_PRESET_DIR``).

Exit codes: 0 success, 2 config error, 3 integration/runtime failure,
4 instability (diverging trajectory, or no trapping minimum found).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import chiptrap, stability
from .dynamics import ChartSingularity
from .fields import FIELD_MAP_COLUMNS, field_map, four_magnet_platform
from .pseudopotential import (
    AXIAL_PROFILE_COLUMNS,
    HEIGHT_SCAN_COLUMNS,
    RADIAL_SCAN_COLUMNS,
    CurvatureProfile,
    ShapeEffectModel,
    axial_profile,
    equilibrium_height,
    height_scan,
    radial_displacement_scan,
)
from .scenario import (
    ConfigError,
    InstabilityDetected,
    RunTimer,
    TOOL_VERSION,
    run_simulation,
    scenario_from_dict,
    sources_from_config,
    write_csv,
    write_json,
    write_manifest,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3
EXIT_UNSTABLE = 4


def preset_directory():
    env = os.environ.get("MAGTRAP_PRESET_DIR")
    if env:
        return env
    return os.path.join(os.path.dirname(__file__), "presets")


def resolve_config(args):
    """Returns (path, text, parsed dict) from --config or --preset."""
    if args.config and args.preset:
        raise ConfigError("--config and --preset are mutually exclusive")
    if args.config:
        path = args.config
    elif args.preset:
        name = args.preset
        if not name.endswith(".json"):
            name += ".json"
        path = os.path.join(preset_directory(), name)
    else:
        raise ConfigError("one of --config or --preset is required")
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    return path, text, cfg


def _axis(spec, where):
    """Grid axis: scalar -> [v]; {min,max,n} -> linspace; list -> values."""
    if isinstance(spec, (int, float)):
        return np.array([float(spec)])
    if isinstance(spec, dict):
        return np.linspace(float(spec["min"]), float(spec["max"]),
                           int(spec["n"]))
    if isinstance(spec, (list, tuple)):
        return np.asarray(spec, dtype=float)
    raise ConfigError(f"{where}: expected number, {{min,max,n}} or a list")




# ---------------------------------------------------------------------------
# subcommand handlers: each returns the list of artifact filenames


def cmd_simulate(cfg, out_dir, jobs):
    scenario = scenario_from_dict(cfg)
    columns, rows = run_simulation(scenario)
    write_csv(os.path.join(out_dir, "trajectory.csv"), columns, rows)
    return ["trajectory.csv"]


def cmd_field_map(cfg, out_dir, jobs):
    sources = sources_from_config(cfg.get("sources", []), "sources")
    grid = cfg.get("grid", {})
    xs = _axis(grid.get("x", 0.0), "grid.x")
    ys = _axis(grid.get("y", 0.0), "grid.y")
    zs = _axis(grid.get("z", 0.0), "grid.z")
    rows = field_map(sources, xs, ys, zs, t=float(cfg.get("t", 0.0)))
    write_csv(os.path.join(out_dir, "field-map.csv"),
              list(FIELD_MAP_COLUMNS), rows)
    return ["field-map.csv"]


def _scan_chunk(chunk, omegas, method):
    return stability.stability_scan(chunk, omegas, method=method)


def cmd_stability_scan(cfg, out_dir, jobs):
    omega_r = _axis(cfg.get("omega_r", {"min": 0, "max": 0, "n": 1}),
                             "omega_r")
    omega = _axis(cfg.get("omega", {"min": 0, "max": 0, "n": 1}),
                           "omega")
    method = cfg.get("method", "eigen")
    if jobs > 1 and len(omega_r) > 1:
        chunks = np.array_split(omega_r, min(jobs, len(omega_r)))
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_scan_chunk, chunks,
                                  [omega] * len(chunks),
                                  [method] * len(chunks)))
        rows = np.vstack(parts)
    else:
        rows = stability.stability_scan(omega_r, omega, method=method)
    write_csv(os.path.join(out_dir, "stability-scan.csv"),
              list(stability.STABILITY_SCAN_COLUMNS), rows)
    return ["stability-scan.csv"]


def _shape_model(cfg):
    platform_cfg = cfg.get("platform", {})
    rotor = cfg.get("rotor", {})
    length = float(rotor.get("length", 10e-3))
    height = float(rotor.get("height", 4e-3))
    density = float(rotor.get("density", 7e3))
    b_sat = float(rotor.get("b_sat", 1.0))
    z_lo, z_hi = (float(v) for v in cfg.get("z_range", (2e-3, 28e-3)))
    assembly = four_magnet_platform(
        side=float(platform_cfg.get("side", 5e-3)),
        height=float(platform_cfg.get("height", 16e-3)),
        circle_diameter=float(platform_cfg.get("circle_diameter", 20e-3)),
        b_sat=float(platform_cfg.get("b_sat", 1.0)),
    )
    pad = height
    profile = CurvatureProfile(assembly, z_lo - pad, z_hi + pad)
    model = ShapeEffectModel(profile, length, height, density, b_sat)
    return assembly, model, (z_lo, z_hi)


def cmd_pseudo_potential(cfg, out_dir, jobs):
    _, model, z_range = _shape_model(cfg)
    omega = float(cfg.get("omega", 2 * np.pi * 80.0))
    gravity_sign = float(cfg.get("gravity_sign", 1.0))
    harmonic = int(cfg.get("drive_harmonic", 1))
    zs = _axis(cfg.get("zs", {"min": z_range[0], "max": z_range[1],
                                       "n": 201}), "zs")
    rows = axial_profile(model, omega, zs, gravity_sign=gravity_sign,
                         drive_harmonic=harmonic)
    write_csv(os.path.join(out_dir, "pseudo-potential.csv"),
              list(AXIAL_PROFILE_COLUMNS), rows)
    eq = equilibrium_height(model, omega, z_range=z_range,
                            gravity_sign=gravity_sign,
                            drive_harmonic=harmonic)
    write_json(os.path.join(out_dir, "equilibrium.json"), {
        "trapped": eq.trapped,
        "reason": eq.reason,
        "z_eq_m": eq.z_eq,
        "omega_r_rad_s": eq.omega_r,
        "omega_r_hz": None if eq.omega_r is None else eq.omega_r / (2 * np.pi),
        "radially_stable": eq.radially_stable,
        "drive_omega_rad_s": omega,
    })
    outputs = ["pseudo-potential.csv", "equilibrium.json"]
    if not eq.trapped:
        raise _DeferredInstability(
            f"no trapping minimum: {eq.reason}", outputs)
    return outputs


def cmd_height_scan(cfg, out_dir, jobs):
    _, model, z_range = _shape_model(cfg)
    omegas = _axis(cfg.get("omegas", {"min": 2 * np.pi * 65,
                                               "max": 2 * np.pi * 120,
                                               "n": 12}), "omegas")
    gravity_sign = float(cfg.get("gravity_sign", 1.0))
    harmonic = int(cfg.get("drive_harmonic", 1))
    rows, trend = height_scan(model, omegas, z_range=z_range,
                              gravity_sign=gravity_sign,
                              drive_harmonic=harmonic)
    write_csv(os.path.join(out_dir, "height-scan.csv"),
              list(HEIGHT_SCAN_COLUMNS), rows)
    write_json(os.path.join(out_dir, "height-scan.json"), {
        "trend": trend,
        "n_trapped": int(np.sum(np.isfinite(rows[:, 1]))),
        "n_points": int(rows.shape[0]),
    })
    return ["height-scan.csv", "height-scan.json"]


def cmd_radial_scan(cfg, out_dir, jobs):
    platform_cfg = cfg.get("platform", {})
    assembly = four_magnet_platform(
        side=float(platform_cfg.get("side", 5e-3)),
        height=float(platform_cfg.get("height", 5e-3)),
        circle_diameter=float(platform_cfg.get("circle_diameter", 20e-3)),
        b_sat=float(platform_cfg.get("b_sat", 1.0)),
    )
    omega = float(cfg.get("omega", 2 * np.pi * 80.0))
    xs = _axis(cfg.get("xs", {"min": -20e-3, "max": 20e-3, "n": 21}),
                        "xs")
    particle = cfg.get("particle", {})
    try:
        rows = radial_displacement_scan(
            assembly, omega, xs,
            z_floor=float(cfg.get("z_floor", 8e-3)),
            z_top=float(cfg.get("z_top", 45e-3)),
            nphi=int(cfg.get("nphi", 64)),
            density=float(particle.get("density", 7e3)),
            b_sat=float(particle.get("b_sat", 1.0)),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    write_csv(os.path.join(out_dir, "radial-scan.csv"),
              list(RADIAL_SCAN_COLUMNS), rows)
    return ["radial-scan.csv"]


def cmd_chip_design(cfg, out_dir, jobs):
    params = {k: v for k, v in cfg.items() if k not in ("sweep",)}
    try:
        design = chiptrap.ChipDesign(**params)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"chip design: {exc}") from exc
    report = chiptrap.design_report(design)
    write_json(os.path.join(out_dir, "chip-design.json"), report)
    outputs = ["chip-design.json"]
    sweep = cfg.get("sweep")
    if sweep:
        from dataclasses import fields as dataclass_fields

        name = sweep.get("parameter")
        if name not in {f.name for f in dataclass_fields(chiptrap.ChipDesign)}:
            raise ConfigError(f"sweep.parameter: cannot sweep '{name}'")
        values = _axis(sweep.get("values", []), "sweep.values")
        rows = []
        for v in values:
            d = chiptrap.ChipDesign(**{**params, name: float(v)})
            r = chiptrap.design_report(d)
            rows.append([v, r["q_z"], r["secular_z_hz"], r["libration_hz"],
                         r["coupling_hz"], r["sag_m"],
                         float(all(r["flags"].values()))])
        write_csv(os.path.join(out_dir, "chip-sweep.csv"),
                  [name, "q_z", "secular_z_hz", "libration_hz",
                   "coupling_hz", "sag_m", "all_flags_ok"], rows)
        outputs.append("chip-sweep.csv")
    return outputs


class _DeferredInstability(InstabilityDetected):
    """Instability verdict whose artifacts were already produced."""

    def __init__(self, message, outputs):
        super().__init__(message, t_fail=None)
        self.outputs = outputs


HANDLERS = {
    "simulate": cmd_simulate,
    "field-map": cmd_field_map,
    "stability-scan": cmd_stability_scan,
    "pseudo-potential": cmd_pseudo_potential,
    "height-scan": cmd_height_scan,
    "radial-scan": cmd_radial_scan,
    "chip-design": cmd_chip_design,
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="magtrap",
        description="Magnetic trap design and simulation toolkit.")
    parser.add_argument("--version", action="version", version=TOOL_VERSION)
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in HANDLERS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="path to a JSON config")
        p.add_argument("--preset", help="name of a shipped preset")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--jobs", type=int, default=1,
                       help="max parallel workers for internal scans")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        path, text, cfg = resolve_config(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    handler = HANDLERS[args.subcommand]
    out_dir = args.out
    os.makedirs(out_dir, exist_ok=True)
    try:
        with RunTimer() as timer:
            outputs = handler(cfg, out_dir, max(1, args.jobs))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except _DeferredInstability as exc:
        write_manifest(out_dir, args.subcommand, path, text, exc.outputs,
                       timer.wall)
        print(f"instability: {exc}", file=sys.stderr)
        return EXIT_UNSTABLE
    except InstabilityDetected as exc:
        write_manifest(out_dir, args.subcommand, path, text, [], timer.wall)
        print(f"instability: {exc}", file=sys.stderr)
        return EXIT_UNSTABLE
    except ChartSingularity as exc:
        print(f"integration failure: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except (RuntimeError, FloatingPointError, OSError) as exc:
        print(f"run failed: {exc}", file=sys.stderr)
        return EXIT_RUNTIME

    write_manifest(out_dir, args.subcommand, path, text, outputs, timer.wall)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
