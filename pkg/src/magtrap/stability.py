"""Linear stability of the rotating-saddle trap.

Three independent routes to the same stability boundary:

1. closed-form criterion ``Omega > omega_r`` (strict; equality is treated
   as unstable);
2. eigenvalues of the rotating-frame coefficient matrix;
3. Floquet multipliers of the monodromy matrix of the time-periodic
   lab-frame equation.

``omega_r`` is the bare saddle frequency ``omega_r^2 = mu B'' / m`` and
``Omega`` the mechanical rotation rate; the field pattern repeats at
``2 Omega`` so the fundamental period of the lab equation is ``pi/Omega``.

The rotating frame is defined by ``V_x = x sin Ωt + y cos Ωt``,
``V_y = x cos Ωt - y sin Ωt`` (V_x is the confining direction at t = 0);
with this ordering the coefficient matrix takes the canonical form
returned by :func:`stability_matrix`.
"""

from __future__ import annotations

import numpy as np

from .dynamics import saddle_point_rhs
from .ode import integrate_adaptive

STABILITY_SCAN_COLUMNS = ("omega_r", "Omega", "max_real_eig", "stable")


def stability_matrix(omega_r, omega):
    """Rotating-frame coefficient matrix for state (Vx, Vy, Vx', Vy')."""
    return np.array(
        [
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
            [omega**2 - omega_r**2, 0.0, 0.0, 2.0 * omega],
            [0.0, omega**2 + omega_r**2, -2.0 * omega, 0.0],
        ]
    )


def is_stable_formula(omega_r, omega):
    """Closed-form criterion; marginal (equal) counts as unstable."""
    return omega > omega_r


def eigenvalue_report(omega_r, omega):
    """(max real part, stable flag) from the rotating-frame eigenvalues.

    The characteristic roots are ``lambda^2 = -Omega^2 +- omega_r^2``; an
    unstable pair appears exactly when omega_r >= Omega.  The flag uses a
    relative tolerance so that marginal cases land on the unstable side.
    """
    lam = np.linalg.eigvals(stability_matrix(omega_r, omega))
    max_real = float(np.max(lam.real))
    scale = max(abs(omega), abs(omega_r), 1.0)
    return max_real, bool(max_real < 1e-9 * scale) and omega > omega_r * (1 + 1e-12)


def stability_margin(omega_r, omega):
    """Negated largest eigenvalue real part: positive never occurs (the
    spectrum is symmetric), zero when stable or marginal, negative when an
    exponentially growing mode exists."""
    lam2 = omega_r**2 - omega**2
    return -float(np.sqrt(lam2)) if lam2 > 0 else 0.0


def monodromy(omega_r, omega, atol=1e-12, rtol=1e-10):
    """Monodromy matrix of the lab-frame saddle equation over one period.

    Integrates the 4x4 fundamental system over T = pi/Omega with the
    adaptive integrator at tight tolerance.
    """
    rhs = saddle_point_rhs(omega_r, omega)

    def mat_rhs(t, y):
        return rhs(t, y.reshape(4, 4).T).T.reshape(16)

    y0 = np.eye(4).reshape(16)
    period = np.pi / omega
    yT = integrate_adaptive(mat_rhs, 0.0, y0, period, atol=atol, rtol=rtol)
    return yT.reshape(4, 4)


def floquet_report(omega_r, omega, atol=1e-12, rtol=1e-10):
    """(max |multiplier|, stable flag) from the monodromy spectrum.

    A volume-preserving (Hamiltonian) system has multipliers on the unit
    circle when stable; tolerance 1e-9 absorbs integrator error.
    """
    mu = np.linalg.eigvals(monodromy(omega_r, omega, atol=atol, rtol=rtol))
    max_abs = float(np.max(np.abs(mu)))
    return max_abs, bool(max_abs <= 1.0 + 1e-9)


def stability_scan(omega_r_values, omega_values, method="eigen"):
    """Grid scan; returns rows (omega_r, Omega, max_real_eig, stable).

    ``method`` picks the route for the stable flag: "eigen", "floquet" or
    "formula".  ``max_real_eig`` is always the eigenvalue-route margin; for
    the Floquet route the growth rate ln(max|mu|)/T is reported instead.
    """
    rows = []
    for wr in np.atleast_1d(omega_r_values):
        for om in np.atleast_1d(omega_values):
            if method == "eigen":
                margin, stable = eigenvalue_report(wr, om)
            elif method == "floquet":
                max_abs, stable = floquet_report(wr, om)
                margin = np.log(max_abs) / (np.pi / om)
            elif method == "formula":
                lam2 = wr**2 - om**2
                margin = float(np.sqrt(lam2)) if lam2 > 0 else 0.0
                stable = is_stable_formula(wr, om)
            else:
                raise ValueError(f"unknown method {method!r}")
            rows.append((wr, om, margin, float(stable)))
    return np.array(rows)


# ---------------------------------------------------------------------------
# secular motion and precession


def secular_frequency(omega_r, omega):
    """Slow confined frequency of the stable saddle, rad/s:
    ``omega_r^2 / (2 Omega)``."""
    return omega_r**2 / (2.0 * omega)


def secular_frequency_variant(omega_r, omega):
    """Alternative normalization seen in circulation (factor 4 smaller).

    Kept for comparison; the simulated spectrum matches
    :func:`secular_frequency`, which is the value used everywhere else in
    the package.
    """
    return omega_r**2 / (8.0 * omega)


def precession_frequency(omega_r, omega):
    """Precession rate of the secular orbit, rad/s:
    ``omega_r^4 / (4 Omega^3)``."""
    return omega_r**4 / (4.0 * omega**3)


def mode_frequencies(omega_r, omega):
    """Exact secular doublet (sigma_plus, sigma_minus) of the
    guiding-center equation ``W'' - w_p J W' + w~^2 W = 0``.

    Circular eigenmodes ``exp(i sigma t)`` give
    ``sigma_pm = w_p/2 +- sqrt(w~^2 + w_p^2/4)``; the splitting
    ``sigma_+ - |sigma_-|`` equals the precession rate w_p.
    """
    wt = secular_frequency(omega_r, omega)
    wp = precession_frequency(omega_r, omega)
    root = np.sqrt(wt**2 + 0.25 * wp**2)
    return 0.5 * wp + root, 0.5 * wp - root


def lab_to_rotating(t, states, omega):
    """Lab (x, y, vx, vy) to rotating-frame (Vx, Vy, Vx', Vy').

    Vectorized over leading axes of ``states``; ``t`` broadcasts.
    """
    states = np.asarray(states, dtype=float)
    x, y = states[..., 0], states[..., 1]
    vx, vy = states[..., 2], states[..., 3]
    c, s = np.cos(omega * t), np.sin(omega * t)
    out = np.empty_like(states)
    out[..., 0] = x * s + y * c
    out[..., 1] = x * c - y * s
    out[..., 2] = vx * s + vy * c + omega * out[..., 1]
    out[..., 3] = vx * c - vy * s - omega * out[..., 0]
    return out


def rotating_to_lab(t, states, omega):
    """Inverse of :func:`lab_to_rotating`."""
    states = np.asarray(states, dtype=float)
    u, v = states[..., 0], states[..., 1]
    du, dv = states[..., 2], states[..., 3]
    c, s = np.cos(omega * t), np.sin(omega * t)
    out = np.empty_like(states)
    out[..., 0] = u * s + v * c
    out[..., 1] = u * c - v * s
    out[..., 2] = (du - omega * v) * s + (dv + omega * u) * c
    out[..., 3] = (du - omega * v) * c - (dv + omega * u) * s
    return out


def guiding_center(t, lab_states, omega_r, omega):
    """Strip the 2*Omega micromotion from lab-frame transverse states.

    ``W = r + (1/4)(omega_r/Omega)^2 S(-Ωt) (r + J r'/Ω)`` with
    ``S(-Ωt) = [[cos 2Ωt, -sin 2Ωt], [-sin 2Ωt, -cos 2Ωt]]`` and
    ``J = [[0, -1], [1, 0]]``.  In complex form w = z + (1/4)(ω_r/Ω)²
    e^(-2iΩt) conj(z + i ż/Ω), the inverse of the leading-order
    micromotion ζ = -(1/4)(ω_r/Ω)² e^(-2iΩt) w̄ of the lab equation
    z'' = ω_r² e^(-2iΩt) z̄.  The remainder is the slow secular orbit
    (precessing ellipse); the residual ripple is second order in
    (ω_r/Ω)².  Sign and phase were arbitrated against simulation: the
    alternatives raise the ripple instead of cancelling it.
    """
    lab_states = np.asarray(lab_states, dtype=float)
    r = lab_states[..., 0:2]
    v = lab_states[..., 2:4]
    c2 = np.cos(2 * omega * np.asarray(t))
    s2 = np.sin(2 * omega * np.asarray(t))
    Jv = np.stack([-v[..., 1], v[..., 0]], axis=-1)
    arg = r + Jv / omega
    Sx = c2 * arg[..., 0] - s2 * arg[..., 1]
    Sy = -s2 * arg[..., 0] - c2 * arg[..., 1]
    corr = np.stack([Sx, Sy], axis=-1)
    return r + 0.25 * (omega_r / omega) ** 2 * corr
