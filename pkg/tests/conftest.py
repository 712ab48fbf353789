import json
import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "ci",
    derandomize=True,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("ci")

HERE = os.path.dirname(__file__)


def load_goldens():
    with open(os.path.join(HERE, "goldens.json")) as fh:
        return json.load(fh)


def run_cli(subcommand, out_dir, preset=None, config=None, jobs=None,
            env_extra=None):
    """Run the installed CLI in a subprocess; returns CompletedProcess."""
    cmd = [sys.executable, "-m", "magtrap.cli", subcommand, "--out", out_dir]
    if preset:
        cmd += ["--preset", preset]
    if config:
        cmd += ["--config", config]
    if jobs:
        cmd += ["--jobs", str(jobs)]
    env = dict(os.environ)
    if env_extra:
        env.update(env_extra)
    return subprocess.run(cmd, capture_output=True, text=True, env=env)


def read_csv(path):
    """(column names, data array) from one of our CSV artifacts."""
    with open(path) as fh:
        columns = fh.readline().strip().split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return columns, data


@pytest.fixture(scope="session")
def preset_runs(tmp_path_factory):
    """One CLI run per shipped preset, shared across the whole session."""
    goldens = load_goldens()
    root = tmp_path_factory.mktemp("preset-runs")
    results = {}
    for name, spec in goldens.items():
        out = root / name
        proc = run_cli(spec["subcommand"], str(out), preset=name)
        results[name] = (spec, out, proc)
    return results


@pytest.fixture(scope="session")
def platform_assembly():
    from magtrap.fields import four_magnet_platform

    return four_magnet_platform()


@pytest.fixture(scope="session")
def platform_model(platform_assembly):
    from magtrap.pseudopotential import CurvatureProfile, ShapeEffectModel

    profile = CurvatureProfile(platform_assembly, -2e-3, 32e-3)
    return ShapeEffectModel(profile, 10e-3, 4e-3, density=7e3, b_sat=1.0)
