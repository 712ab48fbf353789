"""Time-averaged trapping above a spinning magnet platform.

Near the spin axis the assembly's Bz is a pure rotating saddle with a
height-dependent curvature amplitude B''(z).  A body of finite vertical
extent h, moment pinned along +z by the stabilizing homogeneous field,
samples the window average

    Fbar(z) = (1/h) ∫_{z-h/2}^{z+h/2} B''(z') dz'

and a body longer than it is tall (horizontal length l > h) picks up an
oscillating axial energy at twice the spin rate with envelope

    u(z) = (B_sat/mu0) * (Fbar(z)/2) * (l^2 - h^2)/12     [J/m^3]

whose gradient, averaged over the drive, yields the axial pseudopotential
``psi = u'(z)^2 / (4 rho (n Omega)^2)`` (``n = drive_harmonic``, default 1
matching the analytic design expressions).  Radial secular confinement
requires ``Omega > omega_r(z)`` with
``omega_r(z)^2 = B_sat |Fbar(z)| / (mu0 rho)``.

Equilibrium semantics are *capture from outside*: the reported equilibrium
is the minimum reached by steepest descent of the total axial potential
from the outer edge of the search range, which is how a particle is
actually introduced.  A potential falling outward at the edge, a descent
that exits at the floor, or a radially unstable minimum all yield a
no-trap verdict (an interior minimum that cannot be reached from outside
is not reported as a trap).

The general effective-potential machinery (`fourier_effective_potential`)
makes no small-body or pure-saddle assumption: it Fourier-analyzes the
full interaction energy over one mechanical turn and sums the harmonic
pseudopotentials with the same normalization as `psi` above (harmonic n,
oscillating at n*Omega in time, is divided by 4 rho (n Omega / 2)^2 so
the dominant n=2 term reduces exactly to the design expression).  The
radial trap profile uses it with the moment pinned along +z, which is how
the tube-scan particle is actually held (an external homogeneous field
orients it; a vertical moment makes co-rotation immaterial since Rz
leaves e_z fixed).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import minimize_scalar

from .constants import G_EARTH, MU0
from .fields import transverse_saddle_curvature

AXIAL_PROFILE_COLUMNS = ("z", "psi_z", "gravity_term", "total")
HEIGHT_SCAN_COLUMNS = ("Omega", "z_eq", "omega_r", "stable")
RADIAL_SCAN_COLUMNS = ("x", "z_eq")


class CurvatureProfile:
    """Tabulated-and-splined saddle amplitude B''(z) of a static assembly."""

    def __init__(self, source, z_min, z_max, dz=2.5e-4, halfwidth=2e-3, npts=21):
        self.z_grid = np.arange(z_min, z_max + 0.5 * dz, dz)
        vals = np.array(
            [transverse_saddle_curvature(source, z, halfwidth=halfwidth, npts=npts) for z in self.z_grid]
        )
        self._spline = CubicSpline(self.z_grid, vals)

    def bpp(self, z):
        return self._spline(z)

    def window_mean(self, z, h):
        """(1/h) ∫ B'' over the window [z - h/2, z + h/2]."""
        z = np.asarray(z, dtype=float)
        if z.ndim == 0:
            return self._spline.integrate(z - h / 2, z + h / 2) / h
        return np.array([self._spline.integrate(zi - h / 2, zi + h / 2) for zi in z]) / h

    def effective_curvature(self, z, h):
        """Height-averaged saddle amplitude seen by a body of vertical
        extent h: the window mean of B''/2.  Limits: h -> 0 gives
        B''(z)/2; constant B'' gives B''/2 for any h."""
        return self.window_mean(z, h) / 2.0


@dataclass
class CurvatureFit:
    """Even-quadratic fit  f(z) ~ a0 + a2 z^2/2  about the symmetry plane.

    ``odd_fraction`` is the magnitude of a fitted linear term relative to
    the quadratic one over the window (a symmetry diagnostic; the platform
    profile should keep it well under 1%), ``residual`` the rms misfit
    relative to the peak value.  Fits with residual above 5% emit a
    poor-fit warning and are flagged.
    """

    a0: float
    a2: float
    fit_window: tuple
    residual: float
    odd_fraction: float
    poor_fit: bool = False


def fit_even_quadratic(zs, values):
    """Least-squares (a0, a2) of values ~ a0 + a2 z^2/2 (see CurvatureFit)."""
    zs = np.asarray(zs, dtype=float)
    values = np.asarray(values, dtype=float)
    if zs.size < 9:
        raise ValueError("need at least 9 samples for a stable quadratic fit")
    basis = np.column_stack([np.ones_like(zs), zs, zs**2 / 2.0])
    coef, *_ = np.linalg.lstsq(basis, values, rcond=None)
    pred = basis @ coef
    scale = float(np.max(np.abs(values)))
    residual = float(np.sqrt(np.mean((values - pred) ** 2)) / scale) if scale > 0 else 0.0
    halfspan = 0.5 * (zs.max() - zs.min())
    quad_term = abs(coef[2]) * halfspan**2 / 2.0
    odd_fraction = abs(coef[1]) * halfspan / quad_term if quad_term > 0 else np.inf
    fit = CurvatureFit(float(coef[0]), float(coef[2]), (float(zs.min()), float(zs.max())), residual, float(odd_fraction))
    if residual > 0.05:
        fit.poor_fit = True
        warnings.warn(
            f"quadratic fit residual {residual:.1%} exceeds 5%: window likely spans a nonquartic region",
            stacklevel=2,
        )
    return fit


def radial_frequency(a0, density, b_sat):
    """Rotating-frame saddle rate omega_r = sqrt(2 b_sat a0 / (mu0 rho))."""
    if density <= 0:
        raise ValueError("density must be positive")
    return np.sqrt(2.0 * b_sat * abs(a0) / (MU0 * density))


def axial_drive_frequency(a2, length, height, density, b_sat):
    """Harmonic z-drive rate sqrt(b_sat a2 (l^2 - h^2) / (12 mu0 rho)).

    Returns (omega_z, harmonic) where ``harmonic`` is False (and omega_z
    0.0) when a2 (l^2 - h^2) <= 0: a square body or a curvature profile
    bending the wrong way produces no harmonic drive, only the
    gravity-balanced outward push.
    """
    if density <= 0:
        raise ValueError("density must be positive")
    if not length >= height > 0:
        raise ValueError("need l >= h > 0")
    val = b_sat * a2 * (length**2 - height**2) / (12.0 * MU0 * density)
    if val <= 0.0:
        return 0.0, False
    return float(np.sqrt(val)), True


@dataclass
class ShapeEffectModel:
    """Axial trapping model for a bar rotor (length ``l``, height ``h``).

    ``profile`` is the curvature profile of the static assembly; material
    parameters are taken from the rotor.
    """

    profile: CurvatureProfile
    length: float
    height: float
    density: float
    b_sat: float
    g_earth: float = G_EARTH

    def _envelope_spline(self, z_lo, z_hi, dz=1e-4):
        # cached: rebuilt only when the requested range grows
        key = getattr(self, "_env_key", None)
        if key is None or z_lo < key[0] or z_hi > key[1]:
            lo = z_lo if key is None else min(z_lo, key[0])
            hi = z_hi if key is None else max(z_hi, key[1])
            z = np.arange(lo, hi + 0.5 * dz, dz)
            u = (
                (self.b_sat / MU0)
                * (self.profile.window_mean(z, self.height) / 2.0)
                * (self.length**2 - self.height**2)
                / 12.0
            )
            self._env_key = (lo, hi)
            self._env_spline = CubicSpline(z, u)
        return self._env_spline

    def psi(self, z, omega, drive_harmonic=1):
        """Axial pseudopotential per unit volume [J/m^3]."""
        z = np.asarray(z, dtype=float)
        spline = self._envelope_spline(float(np.min(z)) - 5e-4, float(np.max(z)) + 5e-4)
        du = spline(z, 1)
        return du**2 / (4.0 * self.density * (drive_harmonic * omega) ** 2)

    def omega_r(self, z):
        """Radial saddle frequency at height z [rad/s]."""
        fbar = self.profile.window_mean(z, self.height)
        return np.sqrt(np.abs(self.b_sat * fbar) / (MU0 * self.density))

    def total(self, z, omega, gravity_sign=1.0, drive_harmonic=1):
        """psi + gravity, per unit volume."""
        return self.psi(z, omega, drive_harmonic) + gravity_sign * self.density * self.g_earth * np.asarray(z)


@dataclass
class EquilibriumResult:
    trapped: bool
    reason: str
    z_eq: Optional[float] = None
    omega_r: Optional[float] = None
    radially_stable: Optional[bool] = None


def equilibrium_height(model, omega, z_range=(2e-3, 28e-3), dz=1e-4, gravity_sign=1.0, drive_harmonic=1):
    """Capture equilibrium of the axial potential (see module docstring).

    Returns an :class:`EquilibriumResult`; ``trapped`` is False when the
    body escapes outward, descends to the floor, or the found minimum is
    radially unstable (``omega <= omega_r(z_eq)``).
    """
    z = np.arange(z_range[0], z_range[1] + 0.5 * dz, dz)
    tot = model.total(z, omega, gravity_sign=gravity_sign, drive_harmonic=drive_harmonic)
    i = len(z) - 1
    if tot[i - 1] > tot[i]:
        return EquilibriumResult(False, "potential decreases outward at the search edge")
    while i > 0 and tot[i - 1] < tot[i]:
        i -= 1
    if i == 0:
        return EquilibriumResult(False, "descent reaches the floor of the search range")
    res = minimize_scalar(
        lambda zz: float(model.total(zz, omega, gravity_sign=gravity_sign, drive_harmonic=drive_harmonic)),
        bounds=(z[i - 1], z[i + 1]),
        method="bounded",
        options={"xatol": 1e-7},
    )
    z_eq = float(res.x)
    wr = float(model.omega_r(z_eq))
    if omega <= wr:
        return EquilibriumResult(
            False,
            "radially unstable at the axial minimum (Omega <= omega_r)",
            z_eq=z_eq,
            omega_r=wr,
            radially_stable=False,
        )
    return EquilibriumResult(True, "trapped", z_eq=z_eq, omega_r=wr, radially_stable=True)


def height_scan(model, omegas, z_range=(2e-3, 28e-3), dz=1e-4, gravity_sign=1.0, drive_harmonic=1):
    """Equilibrium height vs drive rate.

    Returns ``(rows, trend)`` where rows are
    (Omega, z_eq, omega_r, stable) with NaN entries for no-trap points and
    ``trend`` is "increasing", "decreasing" or "mixed" over the trapped
    points.  Note: measured systems of this kind have shown height
    *increasing* with the spin rate; this time-averaged model predicts the
    opposite, so consumers should treat the trend as a model property, not
    a universal truth.
    """
    rows = []
    zs = []
    for om in np.atleast_1d(omegas):
        r = equilibrium_height(model, om, z_range=z_range, dz=dz, gravity_sign=gravity_sign, drive_harmonic=drive_harmonic)
        if r.trapped:
            rows.append((om, r.z_eq, r.omega_r, 1.0))
            zs.append(r.z_eq)
        else:
            rows.append((om, np.nan, np.nan if r.omega_r is None else r.omega_r, 0.0))
    d = np.diff(zs)
    if len(d) == 0:
        trend = "undefined"
    elif np.all(d > 0):
        trend = "increasing"
    elif np.all(d < 0):
        trend = "decreasing"
    else:
        trend = "mixed"
    return np.array(rows), trend


def axial_profile(model, omega, zs, gravity_sign=1.0, drive_harmonic=1):
    """Rows (z, psi_z, gravity_term, total) for plotting/CSV."""
    zs = np.asarray(zs, dtype=float)
    psi = model.psi(zs, omega, drive_harmonic)
    grav = gravity_sign * model.density * model.g_earth * zs
    return np.column_stack([zs, psi, grav, psi + grav])


# ---------------------------------------------------------------------------
# general Fourier effective potential (no saddle/small-body assumption)


def interaction_energy_per_volume(static_source, positions, mu_hat, body=None, R=None, order=4):
    """-(B_sat/mu0) mu_hat . B averaged over the body volume [J/m^3].

    ``positions`` (N, 3) are body centers in the *static assembly frame*;
    ``body=None`` treats the body as a point.
    """
    positions = np.atleast_2d(np.asarray(positions, dtype=float))
    if body is None:
        b = static_source.field(positions)
        return -np.einsum("ni,i->n", b, mu_hat)
    nodes, weights = body.quadrature(order)
    vol = float(np.sum(weights))
    out = np.empty(positions.shape[0])
    offs = nodes @ np.asarray(R).T
    for n, r in enumerate(positions):
        b = static_source.field(r[None, :] + offs)
        out[n] = -(weights @ (b @ mu_hat)) / vol
    return out


def axial_drive_envelope(static_source, zs, body, R0=None, ntheta=32, order=5, b_sat=None):
    """Signed envelope of the twice-per-turn component of the on-axis
    volume-averaged interaction energy, for a body with moment along +z
    held fixed in the lab while the assembly turns.

    The sign convention is the value of the 2-theta cosine component with
    the body's lab orientation ``R0`` (default: body axes = lab axes)
    aligned to the assembly at theta = 0.  Returned per unit volume: J/m^3
    when ``b_sat`` is given, else in T (leaving the b_sat/mu0 scale to the
    caller, as :func:`interaction_energy_per_volume` does).

    A square-cross-section body nulls this identically: the quarter-turn
    antisymmetry of Bz plus the body's own fourfold symmetry force
    u(theta + pi/2) = -u(theta) = u(theta).  That is the no-z-drive
    statement for l = h; quadrature error is the only residual.
    """
    zs = np.atleast_1d(np.asarray(zs, dtype=float))
    if R0 is None:
        R0 = np.eye(3)
    mu_hat = np.array([0.0, 0.0, 1.0])
    centers = np.stack([np.zeros(zs.size), np.zeros(zs.size), zs], axis=-1)
    us = np.empty((ntheta, zs.size))
    for k, theta in enumerate(2.0 * np.pi * np.arange(ntheta) / ntheta):
        c, s = np.cos(theta), np.sin(theta)
        rz = np.array([[c, s, 0.0], [-s, c, 0.0], [0.0, 0.0, 1.0]])  # lab -> assembly
        us[k] = interaction_energy_per_volume(static_source, centers, mu_hat, body=body, R=rz @ R0, order=order)
    coefs = np.fft.rfft(us, axis=0) / ntheta
    env = 2.0 * np.real(coefs[2])
    if b_sat is not None:
        env = env * (b_sat / MU0)
    return env if env.size > 1 else float(env[0])


def fourier_effective_potential(static_source, omega, x, zs, mu_hat0=(0.0, 0.0, 1.0), body=None, R0=None, nphi=64, density=None, b_sat=None, g_earth=G_EARTH, order=4):
    """Effective axial potential at horizontal offset ``x`` for a body whose
    moment direction is fixed in the assembly frame (``mu_hat0``; the
    default +z is a moment pinned by the stabilizing homogeneous field,
    for which the distinction lab-fixed vs co-rotating vanishes).

    For each height the interaction energy is sampled over ``nphi``
    mechanical angles; harmonic n (time frequency n*omega) contributes
    ``|c_n'(z)|^2 / (rho (n omega / 2)^2)`` (one-sided complex Fourier
    coefficients, z-derivatives by spline), which for the dominant n=2
    term equals the design normalization ``|env'|^2/(4 rho omega^2)`` used
    by :class:`ShapeEffectModel`.  The DC term plus gravity complete the
    potential.  Returns (zs, total) in J/m^3.
    """
    zs = np.asarray(zs, dtype=float)
    phis = 2.0 * np.pi * np.arange(nphi) / nphi
    energies = np.empty((nphi, zs.size))
    scale = b_sat / MU0 if b_sat is not None else 1.0
    mu_hat = np.asarray(mu_hat0, dtype=float)
    for k, phi in enumerate(phis):
        # the lab-fixed scan point orbits within the static assembly frame
        c, s = np.cos(phi), np.sin(phi)
        rz = np.array([[c, s, 0.0], [-s, c, 0.0], [0.0, 0.0, 1.0]])  # lab -> assembly
        centers = np.stack([np.full(zs.size, x), np.zeros(zs.size), zs], axis=-1) @ rz.T
        energies[k] = scale * interaction_energy_per_volume(
            static_source, centers, mu_hat, body=body, R=R0, order=order
        )
    coefs = np.fft.rfft(energies, axis=0) / nphi
    total = np.real(coefs[0]).copy()
    for n in range(1, coefs.shape[0]):
        cre = CubicSpline(zs, coefs[n].real)(zs, 1)
        cim = CubicSpline(zs, coefs[n].imag)(zs, 1)
        total += (cre**2 + cim**2) / (density * (0.5 * n * omega) ** 2)
    total += density * g_earth * zs
    return zs, total


def radial_displacement_scan(static_source, omega, xs, z_floor=8e-3, z_top=45e-3, dz=2.5e-4, mu_hat0=(0.0, 0.0, 1.0), body=None, R0=None, nphi=64, density=None, b_sat=None, g_earth=G_EARTH, order=4, max_offset=50e-3):
    """Equilibrium height along a vertical line at each horizontal offset.

    Models the tube-scan measurement: a particle confined to a vertical
    tube at offset x (bottom at ``z_floor``), moment held along +z by the
    stabilizing homogeneous field.  Starting at the floor, the particle
    rises only while the Fourier effective potential decreases upward,
    settling at the first local minimum above the floor (or staying at
    the floor when the potential increases from there).  Rows are
    (x, z_eq).

    Expected structure for a rotating C4 assembly: z_eq == z_floor for
    small |x| (on the axis Bz vanishes identically at all times, and for
    a vertical moment the quarter-turn antisymmetry also kills the DC
    term off axis, so the lift is purely ponderomotive), a lifted branch
    at intermediate offsets, and a return to the floor once the field has
    decayed.  z(x) = z(-x) exactly.

    Offsets beyond ``max_offset`` are outside the useful field region and
    raise ValueError rather than silently returning floor rows.
    """
    zs = np.arange(z_floor, z_top + 0.5 * dz, dz)
    if zs.size < 3:
        raise ValueError("z_floor/z_top window too short for a scan")
    rows = []
    for x in np.atleast_1d(xs):
        if abs(float(x)) > max_offset:
            raise ValueError(f"offset {float(x):g} m outside field coverage (max {max_offset:g} m)")
        _, tot = fourier_effective_potential(
            static_source, omega, float(x), zs, mu_hat0, body=body, R0=R0, nphi=nphi, density=density, b_sat=b_sat, g_earth=g_earth, order=order
        )
        if tot[1] >= tot[0]:
            rows.append((x, z_floor))
            continue
        i = 0
        while i + 1 < zs.size and tot[i + 1] < tot[i]:
            i += 1
        if i + 1 == zs.size:  # still falling at z_top: window too short
            rows.append((x, np.nan))
            continue
        # parabolic refinement on the grid triple around the minimum
        fa, fb, fc = tot[i - 1], tot[i], tot[i + 1]
        denom = fa - 2 * fb + fc
        zmin = zs[i] + 0.5 * (fa - fc) / denom * dz if denom > 0 else zs[i]
        rows.append((x, zmin))
    return np.array(rows)
