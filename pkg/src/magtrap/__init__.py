"""Design and simulation toolkit for magnetic Paul traps.

Levitation of hard ferromagnetic particles in time-varying magnetic field
curvatures: rotating-saddle and AC-quadrupole trap dynamics, rigid-body
integration with the moment locked to the body frame, linear stability,
time-averaged (pseudo-potential) models for finite rotors, and design
budgets for a lithographic chip trap.
"""

from . import (
    bodies,
    chiptrap,
    constants,
    dynamics,
    fields,
    ode,
    pseudopotential,
    scenario,
    sources,
    stability,
    state,
)
from .bodies import Cuboid, Sphere, tube
from .chiptrap import ChipDesign, design_report
from .scenario import TOOL_VERSION as __version__
from .scenario import load_scenario, run_simulation

__all__ = [
    "bodies",
    "chiptrap",
    "constants",
    "dynamics",
    "fields",
    "ode",
    "pseudopotential",
    "scenario",
    "sources",
    "stability",
    "state",
    "Cuboid",
    "Sphere",
    "tube",
    "ChipDesign",
    "design_report",
    "load_scenario",
    "run_simulation",
    "__version__",
]
