"""Scenario files and deterministic run artifacts.

A scenario is a JSON document with keys ``body``, ``sources`` (list of
tagged source configs), ``gravity`` (bool), ``force_model`` and
``integration``; simulation scenarios add ``initial``.  All quantities SI;
angular rates in rad/s.  The schema is documented in the README and
exercised by the shipped presets.

Every run writes its numeric artifacts (CSV with a header row, 17
significant digits, '.' decimal separator) plus a ``manifest.json``
recording the subcommand, the config hash, the tool version, the output
hashes and the wall time.  Identical config and version give byte-identical
numeric outputs; the manifest alone carries timing and is excluded from any
byte comparison.  Files are written atomically (temp file + rename).
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
import time
from dataclasses import dataclass, field as dataclass_field
from typing import Optional

import numpy as np

from .bodies import Cuboid, Sphere, tube
from .constants import B_SAT, G_EARTH
from .dynamics import (
    euler_energy,
    make_euler_rhs,
    make_quat_rhs,
    point_wrench,
    finite_volume_wrench,
    quat_energy,
    quat_renormalize_state,
)
from .ode import integrate_fixed
from .sources import (
    AxialACQuadrupole,
    CircularLoop,
    CuboidMagnet,
    Homogeneous,
    LinearGradient,
    RotatingSaddle,
    Stack,
)
from .fields import four_magnet_platform, spinning_platform
from .state import (
    TRAJECTORY_COLUMNS,
    angular_momenta_from_rates,
    euler_state_to_quat_state,
    moment_direction,
    quat_state_to_euler_state,
)

try:
    from importlib.metadata import PackageNotFoundError, version

    TOOL_VERSION = version("magtrap")
except PackageNotFoundError:  # running from a source tree
    TOOL_VERSION = "0+unknown"


class ConfigError(ValueError):
    """Malformed or inconsistent scenario/config file."""


class InstabilityDetected(RuntimeError):
    """Trajectory left the configured bounds (or went non-finite)."""

    def __init__(self, message, t_fail):
        super().__init__(message)
        self.t_fail = t_fail


# ---------------------------------------------------------------------------
# deterministic file output


def format_value(v):
    return "%.17e" % float(v)


def write_csv(path, columns, rows):
    """Atomic CSV write: header row, 17-significant-digit scientific."""
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    if rows.size and rows.shape[1] != len(columns):
        raise ValueError(
            f"row width {rows.shape[1]} != {len(columns)} columns")
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(format_value(v) for v in row))
    _atomic_write(path, "\n".join(lines) + "\n")


def write_json(path, obj):
    _atomic_write(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _atomic_write(path, text):
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".part")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def sha256_of_file(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(out_dir, subcommand, config_path, config_text, outputs,
                   wall_time_s):
    manifest = {
        "subcommand": subcommand,
        "config_path": str(config_path) if config_path else None,
        "config_sha256": hashlib.sha256(
            config_text.encode()).hexdigest() if config_text else None,
        "version": TOOL_VERSION,
        "outputs": {
            name: sha256_of_file(os.path.join(out_dir, name))
            for name in sorted(outputs)
        },
        "wall_time_s": wall_time_s,
    }
    write_json(os.path.join(out_dir, "manifest.json"), manifest)
    return manifest


# ---------------------------------------------------------------------------
# config parsing


def _require(cfg, key, where):
    if key not in cfg:
        raise ConfigError(f"{where}: missing key '{key}'")
    return cfg[key]


def _vec3(value, where):
    arr = np.asarray(value, dtype=float)
    if arr.shape != (3,):
        raise ConfigError(f"{where}: expected a 3-vector, got {value!r}")
    return arr


def body_from_config(cfg, where="body"):
    shape = _require(cfg, "shape", where)
    density = float(cfg.get("density", 7e3))
    b_sat = float(cfg.get("b_sat", B_SAT))
    try:
        if shape == "sphere":
            return Sphere(float(_require(cfg, "radius", where)),
                          density=density, b_sat=b_sat)
        if shape == "cuboid":
            lx, ly, lz = (float(v) for v in _require(cfg, "dims", where))
            return Cuboid(lx, ly, lz, density=density, b_sat=b_sat)
        if shape == "tube":
            return tube(float(_require(cfg, "length", where)),
                        float(_require(cfg, "height", where)),
                        density=density, b_sat=b_sat)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from exc
    raise ConfigError(f"{where}: unknown shape '{shape}'")


def source_from_config(cfg, where="source"):
    tag = _require(cfg, "type", where)
    try:
        if tag == "homogeneous":
            return Homogeneous(_vec3(_require(cfg, "b", where), where))
        if tag == "gradient":
            return LinearGradient(float(_require(cfg, "b2p", where)))
        if tag == "chip_quadrupole":
            return AxialACQuadrupole(float(_require(cfg, "b1pp", where)),
                                     float(_require(cfg, "omega", where)))
        if tag == "rotating_saddle":
            return RotatingSaddle(float(_require(cfg, "bpp", where)),
                                  float(_require(cfg, "omega", where)))
        if tag == "loop":
            drive = cfg.get("drive") or {}
            return CircularLoop(
                float(_require(cfg, "radius", where)),
                float(_require(cfg, "current", where)),
                center=_vec3(cfg.get("center", (0, 0, 0)), where),
                normal=_vec3(cfg.get("normal", (0, 0, 1)), where),
                drive_omega=float(drive.get("omega", 0.0)),
                drive_phase=float(drive.get("phase", 0.0)),
            )
        if tag == "cuboid_magnet":
            dims = tuple(float(v) for v in _require(cfg, "dims", where))
            return CuboidMagnet(
                dims,
                _vec3(_require(cfg, "magnetization", where), where),
                center=_vec3(cfg.get("center", (0, 0, 0)), where),
            )
        if tag == "platform":
            kwargs = {
                "side": float(cfg.get("side", 5e-3)),
                "height": float(cfg.get("height", 16e-3)),
                "circle_diameter": float(cfg.get("circle_diameter", 20e-3)),
                "b_sat": float(cfg.get("b_sat", B_SAT)),
            }
            omega = float(cfg.get("omega", 0.0))
            if omega == 0.0:
                return four_magnet_platform(**kwargs)
            return spinning_platform(omega, **kwargs)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from exc
    raise ConfigError(f"{where}: unknown source type '{tag}'")


def sources_from_config(cfgs, where="sources"):
    if not isinstance(cfgs, (list, tuple)) or not cfgs:
        raise ConfigError(f"{where}: expected a non-empty list")
    return Stack([source_from_config(c, f"{where}[{i}]")
                  for i, c in enumerate(cfgs)])


@dataclass
class Scenario:
    body: object
    sources: Stack
    gravity_enabled: bool
    force_model: dict
    integration: dict
    initial: dict = dataclass_field(default_factory=dict)
    raw: dict = dataclass_field(default_factory=dict)

    @property
    def g_earth(self):
        return G_EARTH if self.gravity_enabled else 0.0

    @property
    def volume_order(self):
        if self.force_model.get("kind") == "finite_volume":
            return int(self.force_model.get("order", 4))
        return None


def scenario_from_dict(cfg, where="scenario"):
    body = body_from_config(_require(cfg, "body", where), f"{where}.body")
    sources = sources_from_config(_require(cfg, "sources", where),
                                  f"{where}.sources")
    gravity = bool(cfg.get("gravity", True))
    fm = cfg.get("force_model", {"kind": "dipole"})
    if fm.get("kind") not in ("dipole", "finite_volume", "fixed_moment"):
        raise ConfigError(
            f"{where}.force_model: unknown kind {fm.get('kind')!r}")
    integ = dict(_require(cfg, "integration", where))
    if float(integ.get("t_end", 0.0)) <= 0.0:
        raise ConfigError(f"{where}.integration: t_end must be positive")
    if float(integ.get("dt", 0.0)) <= 0.0:
        raise ConfigError(f"{where}.integration: dt must be positive")
    return Scenario(body=body, sources=sources, gravity_enabled=gravity,
                    force_model=dict(fm), integration=integ,
                    initial=dict(cfg.get("initial", {})), raw=cfg)


def load_scenario(path):
    with open(path) as fh:
        try:
            cfg = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    return scenario_from_dict(cfg, where=str(path))


# ---------------------------------------------------------------------------
# simulation runner


def initial_euler_state(scenario):
    """12-component canonical state from the 'initial' config block."""
    init = scenario.initial
    pos = _vec3(init.get("position", (0, 0, 0)), "initial.position")
    vel = _vec3(init.get("velocity", (0, 0, 0)), "initial.velocity")
    ang = _vec3(init.get("angles", (0, 0, 0)), "initial.angles")
    rates = _vec3(init.get("rates", (0, 0, 0)), "initial.rates")
    body = scenario.body
    p_lin = body.mass * vel
    p_ang = angular_momenta_from_rates(ang[1], ang[2], rates, body.inertia)
    return np.concatenate([pos, ang, p_lin, p_ang])


def _fixed_moment_rhs(scenario):
    body = scenario.body
    source = scenario.sources
    g = scenario.g_earth
    order = scenario.volume_order
    ang = _vec3(scenario.initial.get("angles", (0, 0, 0)), "initial.angles")
    mu_hat = moment_direction(*ang)
    mass = body.mass
    if order is not None:
        from .state import euler_to_matrix

        rot = euler_to_matrix(*ang)

        def rhs(t, y):
            force, _ = finite_volume_wrench(source, body, rot, y[0:3], t,
                                            order)
            acc = force / mass
            acc[2] -= g
            return np.concatenate([y[3:6], acc])
    else:

        def rhs(t, y):
            force, _ = point_wrench(source, body, mu_hat, y[0:3], t)
            acc = force / mass
            acc[2] -= g
            return np.concatenate([y[3:6], acc])

    return rhs, mu_hat


def run_simulation(scenario):
    """Integrate a scenario; returns (columns, rows) of the trajectory.

    Raises :class:`InstabilityDetected` when the recorded trajectory goes
    non-finite or leaves ``integration.escape_radius`` (when set).
    """
    integ = scenario.integration
    dt = float(integ["dt"])
    t_end = float(integ["t_end"])
    nsteps = int(round(t_end / dt))
    every = int(integ.get("record_every", 1))
    route = integ.get("route", "euler")
    body = scenario.body
    source = scenario.sources
    g = scenario.g_earth
    order = scenario.volume_order

    if scenario.force_model.get("kind") == "fixed_moment":
        rhs, mu_hat = _fixed_moment_rhs(scenario)
        y0 = initial_euler_state(scenario)
        ts, ys = integrate_fixed(rhs, 0.0, np.concatenate([y0[0:3],
                                 y0[6:9] / body.mass]), dt, nsteps, every)
        rows = np.zeros((len(ts), len(TRAJECTORY_COLUMNS)))
        rows[:, 0] = ts
        rows[:, 1:4] = ys[:, 0:3]
        rows[:, 4:7] = y0[3:6]
        rows[:, 7:10] = body.mass * ys[:, 3:6]
        mu = body.moment * mu_hat
        for k, (t, y) in enumerate(zip(ts, ys)):
            b = source.field(y[0:3], t)[0]
            rows[k, 13] = (0.5 * body.mass * np.dot(y[3:6], y[3:6])
                           - np.dot(mu, b) + body.mass * g * y[2])
    elif route == "euler":
        rhs = make_euler_rhs(source, body, g_earth=g, volume_order=order)
        y0 = initial_euler_state(scenario)
        ts, ys = integrate_fixed(rhs, 0.0, y0, dt, nsteps, every)
        rows = np.zeros((len(ts), len(TRAJECTORY_COLUMNS)))
        rows[:, 0] = ts
        rows[:, 1:13] = ys
        for k, (t, y) in enumerate(zip(ts, ys)):
            rows[k, 13] = euler_energy(source, body, t, y, g_earth=g)
    elif route == "quaternion":
        rhs = make_quat_rhs(source, body, g_earth=g, volume_order=order)
        y0 = euler_state_to_quat_state(initial_euler_state(scenario),
                                       scenario.body.inertia)
        ts, ys = integrate_fixed(rhs, 0.0, y0, dt, nsteps, every,
                                 postprocess=quat_renormalize_state)
        rows = np.zeros((len(ts), len(TRAJECTORY_COLUMNS)))
        rows[:, 0] = ts
        for k, (t, y) in enumerate(zip(ts, ys)):
            rows[k, 1:13] = quat_state_to_euler_state(y)
            rows[k, 13] = quat_energy(source, body, t, y, g_earth=g)
    else:
        raise ConfigError(f"integration.route: unknown route '{route}'")

    _check_bounds(rows, integ.get("escape_radius"))
    return list(TRAJECTORY_COLUMNS), rows


def _check_bounds(rows, escape_radius):
    pos = rows[:, 1:4]
    bad = ~np.isfinite(rows).all(axis=1)
    if escape_radius is not None:
        bad |= np.linalg.norm(pos, axis=1) > float(escape_radius)
    if bad.any():
        k = int(np.argmax(bad))
        t_fail = rows[k, 0] if np.isfinite(rows[k, 0]) else float("nan")
        raise InstabilityDetected(
            f"trajectory left bounds at t = {t_fail:.9e} s", t_fail)


class RunTimer:
    def __enter__(self):
        self.t0 = time.monotonic()
        return self

    def __exit__(self, *exc):
        self.wall = time.monotonic() - self.t0
        return False
