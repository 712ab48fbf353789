"""Planar AC-quadrupole (chip) trap: design formulas and feasibility budgets.

A micron-scale hard-magnetic sphere sits above a lithographic double loop
driven at ``Omega``; the loop pair (radii r1, r2 = 2 r1, currents i1,
i2 = -2 i1) nulls the on-axis field, leaving a pure oscillating curvature
``b1pp``.  A static bias ``b0 ez`` holds the moment upright and sets the
libration frequencies; a static gradient shim ``b2p`` cancels gravity.

Conventions (sphere radius a, transverse = axial inertia 2ma^2/5):

* q-factors: ``q_z = -2 q_x = 2 b1pp B_sat / (mu0 rho Omega^2)``
* secular: ``omega_z = (Omega/2) |q_z| / sqrt(2)``, ``omega_x = omega_z/2``
  (the standard Mathieu first-order result; ``secular_frequencies_variant``
  keeps a 2x-larger normalization seen in circulation, and the simulated
  spectrum in the test suite arbitrates in favor of the standard form)
* libration: ``omega_lib = sqrt((5/2) b0 B_sat / (mu0 rho a^2))``
* CoM-angle coupling from the shim:
  ``omega_c = sqrt(sqrt(5/2) b2p B_sat / (mu0 rho a))``
* gravity shim: ``b2p = mu0 rho g / B_sat``; uncompensated sag
  ``-g / omega_z^2``.

``b1pp`` (the drive amplitude entering q) is the on-axis second derivative
of Bz.  The geometry-level quantity usually quoted for the double loop is
the z^2 *coefficient* of the on-axis expansion, which is half of that; see
:func:`loop_curvature` and the two curvature entries in the report.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .constants import B_SAT, G_EARTH, J_WIRE_LIMIT, MU0, RHO_MAGNET, SIGMA_CU
from .fields import (
    double_loop_curvature,
    double_loop_z2_coefficient,
)
from .sources import AxialACQuadrupole, CircularLoop, Homogeneous, \
    LinearGradient, Stack

SECULAR_VALIDITY_Q = 0.4      # time-averaging assumption
MATHIEU_FIRST_ZONE_Q = 0.908  # hard stability boundary at zero DC term
NULL_RATIO_TOL = 1e-6

# Coarser rounded figure quoted alongside the exact formula value for the
# reference design constants (rho = 7e3, B_sat = 1); kept for comparison.
SHIM_GRADIENT_ALTERNATE = 8.0e-2


def q_factors(b1pp, omega, density=RHO_MAGNET, b_sat=B_SAT):
    """(q_z, q_x) drive parameters; q_x = q_y = -q_z/2."""
    qz = 2.0 * b1pp * b_sat / (MU0 * density * omega**2)
    return qz, -0.5 * qz


def drive_for_q(qz, b1pp, density=RHO_MAGNET, b_sat=B_SAT):
    """Drive rate that realizes a target |q_z| at fixed curvature."""
    return np.sqrt(2.0 * b1pp * b_sat / (MU0 * density * abs(qz)))


def secular_frequencies(omega, qz):
    """(omega_z, omega_x) secular rates in rad/s, standard Mathieu form."""
    wz = 0.5 * omega * abs(qz) / np.sqrt(2.0)
    return wz, 0.5 * wz


def secular_frequencies_variant(omega, qz):
    """Alternative normalization (2x): kept for comparison only."""
    wz, wx = secular_frequencies(omega, qz)
    return 2.0 * wz, 2.0 * wx


def libration_frequency(b0, radius, density=RHO_MAGNET, b_sat=B_SAT):
    """Angular libration rate of the moment about the bias field [rad/s]."""
    return np.sqrt(2.5 * b0 * b_sat / (MU0 * density * radius**2))


def shim_gradient(density=RHO_MAGNET, b_sat=B_SAT, g_earth=G_EARTH):
    """Gradient b2p that exactly supports the weight: mu0 rho g / B_sat.

    Size-independent (both the weight and the moment scale with volume).
    """
    return MU0 * density * g_earth / b_sat


def coupling_frequency(b2p, radius, density=RHO_MAGNET, b_sat=B_SAT):
    """CoM-angle cross-coupling rate induced by the shim gradient [rad/s]."""
    return np.sqrt(np.sqrt(2.5) * b2p * b_sat / (MU0 * density * radius))


def coupling_negligible(omega_c, omega_sec_x, omega_lib):
    """True when the shim-induced coupling can be ignored.

    The coupling mixes a CoM mode (omega_sec_x) with an angular mode
    (omega_lib); it is negligible when ``10 omega_c^2`` is still strictly
    below the product of the two mode rates.  (A smaller omega_c is always
    better; omega_c = 0 trivially passes.)
    """
    return 10.0 * omega_c**2 < omega_sec_x * omega_lib


def gravity_sag(omega_sec_z, g_earth=G_EARTH):
    """Static displacement of the secular equilibrium without a shim [m]."""
    return -g_earth / omega_sec_z**2


def wire_current_density(current, width, thickness):
    """Current density magnitude in A/cm^2 for a rectangular wire."""
    return abs(current) / (width * thickness) * 1e-4


def current_density_check(current, width, thickness, limit=J_WIRE_LIMIT):
    """(j in A/cm^2, feasible) for one wire; the limit is inclusive."""
    j = wire_current_density(current, width, thickness)
    return j, bool(j <= limit)


def induced_current_ratio(omega, sigma=SIGMA_CU, slice_area=100e-12):
    """Peak loop-to-loop induced current over drive current:
    ``mu0 sigma S Omega / 4`` with S the wire slice area."""
    return MU0 * sigma * slice_area * omega / 4.0


def eddy_power(omega, radius, b1pp, sigma=SIGMA_CU):
    """Joule heating of the sphere by internal induced currents [W].

    Order-of-magnitude estimate ``Omega^2 sigma a^9 b1pp^2`` (the interior
    field scales as b1pp a^2, the current density as Omega sigma a^3 b1pp).
    """
    return omega**2 * sigma * radius**9 * b1pp**2


@dataclass
class ChipDesign:
    """Complete parameter set of the planar trap.

    ``b2p=None`` selects the exact gravity shim.  ``b1pp`` is the drive
    amplitude used by the dynamics (the on-axis d^2Bz/dz^2 the loop pair is
    designed to realize); the loop geometry itself enters through the
    curvature cross-check and the feasibility budgets.
    """

    b1pp: float = 1e5
    drive_omega: float = 2.0 * np.pi * 2000.0
    b0: float = 1e-2
    b2p: Optional[float] = None
    radius: float = 1e-6
    density: float = RHO_MAGNET
    b_sat: float = B_SAT
    r1: float = 100e-6
    r2: float = 200e-6
    i1: float = 0.1
    i2: float = -0.2
    wire_width: float = 50e-6
    wire_thickness: float = 2e-6
    conductivity: float = SIGMA_CU
    slice_area: float = 100e-12
    g_earth: float = G_EARTH

    def __post_init__(self):
        if not 0.0 < self.r1 < self.r2:
            raise ValueError("loop radii must satisfy 0 < r1 < r2")

    def null_ratio_deviation(self):
        """Relative deviation of i1/i2 from -r1/r2 (0 = exact field null)."""
        target = -self.r1 / self.r2
        return abs(self.i1 / self.i2 - target) / abs(target)

    def effective_b2p(self):
        if self.b2p is not None:
            return self.b2p
        return shim_gradient(self.density, self.b_sat, self.g_earth)

    def loops(self, drive=True):
        """The two lithographic loops as field sources."""
        w = self.drive_omega if drive else 0.0
        return Stack([
            CircularLoop(self.r1, self.i1, drive_omega=w),
            CircularLoop(self.r2, self.i2, drive_omega=w),
        ])

    def sources(self, include_shim=True, include_bias=True):
        """Idealized field stack for simulation: harmonic drive + bias
        (+ shim).  The harmonic drive is the quadratic model the loops
        realize near the center."""
        parts = [AxialACQuadrupole(self.b1pp, self.drive_omega)]
        if include_bias:
            parts.append(Homogeneous(np.array([0.0, 0.0, self.b0])))
        if include_shim:
            parts.append(LinearGradient(self.effective_b2p()))
        return Stack(parts)


def _onaxis_z2_coefficient(source, halfwidth, npts=41):
    z = np.linspace(-halfwidth, halfwidth, npts)
    pts = np.stack([np.zeros(npts), np.zeros(npts), z], axis=-1)
    bz = source.field(pts)[:, 2]
    return np.polynomial.polynomial.polyfit(z, bz, 4)[2]


def loop_curvature(design):
    """z^2 coefficient of the on-axis Bz of the design's loop pair [T/m^2].

    Closed form ``-(9/16) mu0 i1 / r1^3`` when the currents satisfy the
    null ratio i1/i2 = -r1/r2 and r2 = 2 r1; otherwise fitted numerically
    from the superposed loop fields.  The drive amplitude entering the
    q-factor (on-axis d^2Bz/dz^2) is twice this.
    """
    d = design
    exact_geometry = (d.null_ratio_deviation() <= NULL_RATIO_TOL
                      and abs(d.r2 / d.r1 - 2.0) <= NULL_RATIO_TOL)
    if exact_geometry:
        return double_loop_z2_coefficient(d.i1, d.r1)
    return _onaxis_z2_coefficient(d.loops(drive=False), 0.05 * d.r1)


def design_report(design):
    """All derived quantities and go/no-go flags for a :class:`ChipDesign`.

    The current-density flag is evaluated on the inner-loop current (the
    outer loop carries twice the current and exceeds the guideline in the
    reference design; it is reported for information).  Both the formula
    shim gradient and the coarser rounded alternate are reported, with the
    relative discrepancy.
    """
    d = design
    qz, qx = q_factors(d.b1pp, d.drive_omega, d.density, d.b_sat)
    wz, wx = secular_frequencies(d.drive_omega, qz)
    wlib = libration_frequency(d.b0, d.radius, d.density, d.b_sat)
    b2p = d.effective_b2p()
    wc = coupling_frequency(b2p, d.radius, d.density, d.b_sat)
    sag = gravity_sag(wz, d.g_earth)
    j1, j1_ok = current_density_check(d.i1, d.wire_width, d.wire_thickness)
    j2, _ = current_density_check(d.i2, d.wire_width, d.wire_thickness)
    ratio = induced_current_ratio(d.drive_omega, d.conductivity, d.slice_area)
    p_eddy = eddy_power(d.drive_omega, d.radius, d.b1pp, d.conductivity)
    mass = d.density * 4.0 / 3.0 * np.pi * d.radius**3
    moment = d.b_sat / MU0 * 4.0 / 3.0 * np.pi * d.radius**3
    shim_weight_fraction = moment * b2p / (mass * d.g_earth)
    coeff = loop_curvature(d)
    coeff_fit = _onaxis_z2_coefficient(d.loops(drive=False), 0.05 * d.r1)

    report = {
        "parameters": asdict(d),
        "mass_kg": mass,
        "moment_a_m2": moment,
        "q_z": qz,
        "q_x": qx,
        "secular_z_rad_s": wz,
        "secular_x_rad_s": wx,
        "secular_z_hz": wz / (2 * np.pi),
        "secular_x_hz": wx / (2 * np.pi),
        "libration_rad_s": wlib,
        "libration_hz": wlib / (2 * np.pi),
        "coupling_rad_s": wc,
        "coupling_hz": wc / (2 * np.pi),
        "b2p_t_per_m": b2p,
        "b2p_alternate_t_per_m": SHIM_GRADIENT_ALTERNATE,
        "b2p_alternate_discrepancy": abs(b2p - SHIM_GRADIENT_ALTERNATE)
        / SHIM_GRADIENT_ALTERNATE,
        "shim_weight_fraction": shim_weight_fraction,
        "sag_m": sag,
        "sag_shimmed_m": sag * (1.0 - shim_weight_fraction),
        "loop_z2_coefficient_t_per_m2": coeff,
        "loop_z2_coefficient_fit_t_per_m2": coeff_fit,
        "loop_second_derivative_t_per_m2": double_loop_curvature(d.i1, d.r1),
        "null_ratio_deviation": d.null_ratio_deviation(),
        "j1_a_per_cm2": j1,
        "j2_a_per_cm2": j2,
        "induced_current_ratio": ratio,
        "eddy_power_w": p_eddy,
        "flags": {
            "mathieu_stable": bool(abs(qz) <= MATHIEU_FIRST_ZONE_Q),
            "secular_valid": bool(abs(qz) <= SECULAR_VALIDITY_Q),
            "coupling_negligible": bool(coupling_negligible(wc, wx, wlib)),
            "current_density_ok": j1_ok,
            "induced_current_ok": bool(ratio < 1e-2),
            "null_ratio_ok": bool(
                d.null_ratio_deviation() <= NULL_RATIO_TOL),
        },
    }
    return report


def report_to_json(report, path):
    with open(path, "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
