"""Equations of motion for a magnetized rigid body in a drive field.

Two equivalent formulations are provided and cross-checked in the tests:

* the canonical (Hamiltonian) route in the shifted zyz chart, valid for
  bodies symmetric about e3 and away from the chart singularity;
* a quaternion route (orientation quaternion + body angular momentum),
  singularity-free and valid for arbitrary diagonal inertia.

The Hamiltonian, with ``s = sin(beta_tilde)``, ``c = cos(beta_tilde)``,
transverse/axial inertia ``It``/``Ia``::

    H = |p|^2/(2m) + (p_alpha + p_gamma s)^2/(2 It c^2)
        + p_beta^2/(2 It) + p_gamma^2/(2 Ia) - mu . B + m g z

The resulting angular momentum equations pick up the chart's kinetic
coupling term in beta_tilde; its sign follows from -dH/d(beta_tilde) and is
pinned by an energy-conservation test::

    dp_beta/dt = -(p_alpha + p_gamma s)(p_alpha s + p_gamma)/(It c^3) + torque

Forces and torques come either from the point-dipole limit or from
Gauss-Legendre quadrature over the body volume (``volume_order``).
"""

from __future__ import annotations

import numpy as np

from .constants import G_EARTH, MU0
from .bodies import symmetric_top_inertia
from .state import (
    euler_to_matrix,
    moment_direction,
    quat_multiply,
    quat_normalize,
    quat_to_matrix,
    torque_axes,
)


class ChartSingularity(RuntimeError):
    """Raised when the Euler-route state reaches cos(beta_tilde) ~ 0."""


def finite_volume_wrench(source, body, R, position, t=0.0, order=4):
    """Total magnetic force and torque on a uniformly magnetized body.

    ``F = ∫ (∇B)^T M dV``,
    ``Γ = ∫ [ M x B + (R ξ) x ((∇B)^T M) ] dV``
    with M the (lab-frame) magnetization and ξ the body-frame offset of
    each volume element; torque is taken about the body center.
    """
    nodes, weights = body.quadrature(order)
    pts = np.asarray(position)[None, :] + nodes @ np.asarray(R).T
    mu_hat = -np.asarray(R)[:, 0]
    M = (body.b_sat / MU0) * mu_hat
    g = source.gradient(pts, t)
    b = source.field(pts, t)
    f_nodes = np.einsum("nij,i->nj", g, M)
    force = weights @ f_nodes
    arms = nodes @ np.asarray(R).T
    torque = weights @ (np.cross(M[None, :], b) + np.cross(arms, f_nodes))
    return force, torque


def point_wrench(source, body, mu_hat, position, t=0.0):
    """Point-dipole force and torque: ``F = (∇B)^T mu``, ``Γ = mu x B``."""
    mu_vec = body.moment * np.asarray(mu_hat)
    g = source.gradient(np.asarray(position)[None, :], t)[0]
    b = source.field(np.asarray(position)[None, :], t)[0]
    return g.T @ mu_vec, np.cross(mu_vec, b)


def make_euler_rhs(source, body, g_earth=G_EARTH, volume_order=None, singular_tol=1e-8):
    """Right-hand side for the canonical 12-component state.

    ``volume_order=None`` uses the point-dipole wrench; an integer selects
    Gauss-Legendre quadrature of that order over the body volume.
    """
    it, ia = symmetric_top_inertia(body)
    m = body.mass
    mu = body.moment

    def rhs(t, y):
        r = y[0:3]
        alpha, beta, gamma = y[3], y[4], y[5]
        p = y[6:9]
        p_a, p_b, p_g = y[9], y[10], y[11]
        c, s = np.cos(beta), np.sin(beta)
        if abs(c) < singular_tol:
            raise ChartSingularity(f"cos(beta_tilde) = {c:.2e} at t = {t:.6g}")

        mu_hat = moment_direction(alpha, beta, gamma)
        if volume_order is None:
            force, torque = point_wrench(source, body, mu_hat, r, t)
        else:
            R = euler_to_matrix(alpha, beta, gamma)
            force, torque = finite_volume_wrench(source, body, R, r, t, order=volume_order)

        a_alpha, a_beta, a_gamma = torque_axes(alpha, beta)
        pg_term = p_a + p_g * s

        dy = np.empty(12)
        dy[0:3] = p / m
        dy[3] = pg_term / (it * c**2)
        dy[4] = p_b / it
        dy[5] = pg_term * s / (it * c**2) + p_g / ia
        dy[6:9] = force
        dy[6 + 2] += -m * g_earth
        dy[9] = a_alpha @ torque
        dy[10] = -pg_term * (p_a * s + p_g) / (it * c**3) + a_beta @ torque
        dy[11] = a_gamma @ torque
        return dy

    return rhs


def euler_energy(source, body, t, y, g_earth=G_EARTH):
    """Instantaneous Hamiltonian along an Euler-route trajectory."""
    it, ia = symmetric_top_inertia(body)
    y = np.asarray(y, dtype=float)
    single = y.ndim == 1
    y = np.atleast_2d(y)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.empty(y.shape[0])
    for n in range(y.shape[0]):
        r = y[n, 0:3]
        alpha, beta, gamma = y[n, 3], y[n, 4], y[n, 5]
        p = y[n, 6:9]
        p_a, p_b, p_g = y[n, 9], y[n, 10], y[n, 11]
        c, s = np.cos(beta), np.sin(beta)
        mu_vec = body.moment * moment_direction(alpha, beta, gamma)
        b = source.field(r[None, :], t[n] if t.size > 1 else t[0])[0]
        out[n] = (
            p @ p / (2 * body.mass)
            + (p_a + p_g * s) ** 2 / (2 * it * c**2)
            + p_b**2 / (2 * it)
            + p_g**2 / (2 * ia)
            - mu_vec @ b
            + body.mass * g_earth * r[2]
        )
    return out[0] if single else out


def make_quat_rhs(source, body, g_earth=G_EARTH, volume_order=None):
    """Right-hand side for the 13-component quaternion-route state."""
    m = body.mass
    inertia = np.asarray(body.inertia, dtype=float)

    def rhs(t, y):
        r = y[0:3]
        q = quat_normalize(y[3:7])
        p = y[7:10]
        L = y[10:13]
        R = quat_to_matrix(q)
        mu_hat = -R[:, 0]
        if volume_order is None:
            force, torque = point_wrench(source, body, mu_hat, r, t)
        else:
            force, torque = finite_volume_wrench(source, body, R, r, t, order=volume_order)
        omega_body = L / inertia
        dy = np.empty(13)
        dy[0:3] = p / m
        dy[3:7] = 0.5 * quat_multiply(q, np.concatenate([[0.0], omega_body]))
        dy[7:10] = force
        dy[9] += -m * g_earth
        dy[10:13] = R.T @ torque - np.cross(omega_body, L)
        return dy

    return rhs


def quat_renormalize_state(y):
    """Per-step postprocess hook: project the quaternion back to unit norm."""
    out = np.array(y, dtype=float)
    out[3:7] = quat_normalize(out[3:7])
    return out


def quat_energy(source, body, t, y, g_earth=G_EARTH):
    """Instantaneous energy along a quaternion-route trajectory."""
    inertia = np.asarray(body.inertia, dtype=float)
    y = np.asarray(y, dtype=float)
    single = y.ndim == 1
    y = np.atleast_2d(y)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.empty(y.shape[0])
    for n in range(y.shape[0]):
        r = y[n, 0:3]
        q = quat_normalize(y[n, 3:7])
        p = y[n, 7:10]
        L = y[n, 10:13]
        R = quat_to_matrix(q)
        mu_vec = body.moment * (-R[:, 0])
        b = source.field(r[None, :], t[n] if t.size > 1 else t[0])[0]
        omega = L / inertia
        out[n] = (
            p @ p / (2 * body.mass)
            + 0.5 * omega @ L
            - mu_vec @ b
            + body.mass * g_earth * r[2]
        )
    return out[0] if single else out


def saddle_point_rhs(omega_r, omega):
    """Transverse point-particle motion in the ideal rotating saddle.

    State ``[..., (x, y, vx, vy)]``; vectorized over leading axes.  Lab
    frame::

        x'' =  omega_r^2 (x cos 2Ωt - y sin 2Ωt)
        y'' = -omega_r^2 (y cos 2Ωt + x sin 2Ωt)
    """
    wr2 = omega_r**2

    def rhs(t, y):
        c, s = np.cos(2 * omega * t), np.sin(2 * omega * t)
        x, yy, vx, vy = y[..., 0], y[..., 1], y[..., 2], y[..., 3]
        out = np.empty_like(y)
        out[..., 0] = vx
        out[..., 1] = vy
        out[..., 2] = wr2 * (x * c - yy * s)
        out[..., 3] = -wr2 * (yy * c + x * s)
        return out

    return rhs
