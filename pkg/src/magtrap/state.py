"""Orientation parametrizations and canonical state layout.

Two interchangeable descriptions of rigid-body orientation are used
throughout:

* a shifted zyz Euler chart ``(alpha, beta_tilde, gamma)`` with
  ``R = Rz(alpha) Ry(beta_tilde + pi/2) Rz(gamma)``.  The pi/2 shift places
  the chart's regular region where the trapped particle actually operates:
  ``beta_tilde = gamma = 0`` orients the magnetic moment (carried along the
  body -e1 axis) straight up.  The chart degenerates where
  ``cos(beta_tilde) = 0`` (body e3 vertical).
* unit quaternions ``(w, x, y, z)``, singularity-free; used by the
  alternative integrator route and for cross-checks.

Canonical Euler-route state vector (12 components)::

    [x, y, z, alpha, beta_tilde, gamma, px, py, pz, p_alpha, p_beta_tilde, p_gamma]

Quaternion-route state vector (13 components)::

    [x, y, z, qw, qx, qy, qz, px, py, pz, L1, L2, L3]

with L the angular momentum in body axes.
"""

from __future__ import annotations

import numpy as np

E1 = np.array([1.0, 0.0, 0.0])
E2 = np.array([0.0, 1.0, 0.0])
E3 = np.array([0.0, 0.0, 1.0])


def rot_z(angle):
    """Rotation matrix about the z axis."""
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def rot_y(angle):
    """Rotation matrix about the y axis."""
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def euler_to_matrix(alpha, beta_tilde, gamma):
    """Rotation matrix of the shifted zyz chart.

    ``R = Rz(alpha) @ Ry(beta_tilde + pi/2) @ Rz(gamma)`` maps body axes to
    lab axes.
    """
    return rot_z(alpha) @ rot_y(beta_tilde + np.pi / 2) @ rot_z(gamma)


def matrix_to_euler(R):
    """Invert :func:`euler_to_matrix`.

    Returns ``(alpha, beta_tilde, gamma)`` with ``beta_tilde`` in
    ``[-pi/2, pi/2]``.  At the chart singularity (body e3 along +-z,
    ``cos(beta_tilde) = 0``) alpha and gamma are degenerate; the convention
    ``gamma = 0`` is returned there.
    """
    # beta in [0, pi] from the zyz decomposition, then shift
    sb = np.hypot(R[0, 2], R[1, 2])
    beta = np.arctan2(sb, R[2, 2])
    if sb > 1e-12:
        alpha = np.arctan2(R[1, 2], R[0, 2])
        gamma = np.arctan2(R[2, 1], -R[2, 0])
    else:
        # gimbal lock: only alpha +- gamma is defined
        alpha = np.arctan2(-R[0, 1], R[0, 0]) if R[2, 2] > 0 else np.arctan2(R[0, 1], -R[0, 0])
        gamma = 0.0
    return alpha, beta - np.pi / 2, gamma


def euler_rate_matrix(beta_tilde, gamma):
    """Map Euler-angle rates to body angular velocity.

    ``omega_body = K @ [alpha_dot, beta_tilde_dot, gamma_dot]`` with::

        K = [[-cb*cg, sg, 0],
             [ cb*sg, cg, 0],
             [-sb,     0, 1]],   det K = -cos(beta_tilde)

    so the map degenerates exactly at the chart singularity.
    """
    cb, sb = np.cos(beta_tilde), np.sin(beta_tilde)
    cg, sg = np.cos(gamma), np.sin(gamma)
    return np.array([[-cb * cg, sg, 0.0], [cb * sg, cg, 0.0], [-sb, 0.0, 1.0]])


def angular_momenta_from_rates(beta_tilde, gamma, rates, inertia):
    """Canonical momenta (p_alpha, p_beta_tilde, p_gamma) from angle rates.

    ``p = K^T I K rates`` with I the diagonal body inertia tensor.
    """
    K = euler_rate_matrix(beta_tilde, gamma)
    return K.T @ (np.asarray(inertia) * (K @ np.asarray(rates)))


def body_omega_from_momenta(beta_tilde, gamma, p_ang, inertia):
    """Body angular velocity from canonical momenta: ``omega = I^-1 K^-T p``."""
    K = euler_rate_matrix(beta_tilde, gamma)
    L_body = np.linalg.solve(K.T, np.asarray(p_ang))
    return L_body / np.asarray(inertia)


def moment_direction(alpha, beta_tilde, gamma):
    """Lab-frame unit vector of the magnetic moment (along body -e1).

    Closed form (ca = cos alpha etc.)::

        mu_hat = ( ca*sb*cg + sa*sg,
                   sa*sb*cg - ca*sg,
                   cb*cg )
    """
    ca, sa = np.cos(alpha), np.sin(alpha)
    cb, sb = np.cos(beta_tilde), np.sin(beta_tilde)
    cg, sg = np.cos(gamma), np.sin(gamma)
    return np.array([ca * sb * cg + sa * sg, sa * sb * cg - ca * sg, cb * cg])


def torque_axes(alpha, beta_tilde):
    """Projection axes for the generalized torques.

    The generalized force on each Euler angle is ``a_eta . (mu x B)`` where
    ``a_eta`` is the lab-frame rotation axis the angle advances about:
    ``a_alpha = ez``, ``a_beta_tilde = Rz(alpha) ey``,
    ``a_gamma = R e3 = (ca*cb, sa*cb, -sb)``.
    """
    ca, sa = np.cos(alpha), np.sin(alpha)
    cb, sb = np.cos(beta_tilde), np.sin(beta_tilde)
    a_alpha = E3
    a_beta = np.array([-sa, ca, 0.0])
    a_gamma = np.array([ca * cb, sa * cb, -sb])
    return a_alpha, a_beta, a_gamma


# ---------------------------------------------------------------------------
# quaternions (w, x, y, z), scalar first


def quat_multiply(q, p):
    """Hamilton product q ⊗ p."""
    qw, qx, qy, qz = q
    pw, px, py, pz = p
    return np.array(
        [
            qw * pw - qx * px - qy * py - qz * pz,
            qw * px + qx * pw + qy * pz - qz * py,
            qw * py - qx * pz + qy * pw + qz * px,
            qw * pz + qx * py - qy * px + qz * pw,
        ]
    )


def quat_normalize(q):
    return np.asarray(q) / np.linalg.norm(q)


def quat_to_matrix(q):
    """Rotation matrix of a unit quaternion (body -> lab)."""
    w, x, y, z = q
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ]
    )


def matrix_to_quat(R):
    """Unit quaternion of a rotation matrix (Shepperd's method, w >= 0)."""
    tr = np.trace(R)
    if tr > 0:
        s = np.sqrt(tr + 1.0) * 2
        q = np.array(
            [0.25 * s, (R[2, 1] - R[1, 2]) / s, (R[0, 2] - R[2, 0]) / s, (R[1, 0] - R[0, 1]) / s]
        )
    else:
        i = int(np.argmax(np.diag(R)))
        j, k = (i + 1) % 3, (i + 2) % 3
        s = np.sqrt(max(R[i, i] - R[j, j] - R[k, k] + 1.0, 0.0)) * 2
        q = np.empty(4)
        q[0] = (R[k, j] - R[j, k]) / s
        q[1 + i] = 0.25 * s
        q[1 + j] = (R[j, i] + R[i, j]) / s
        q[1 + k] = (R[k, i] + R[i, k]) / s
    if q[0] < 0:
        q = -q
    return quat_normalize(q)


def euler_to_quat(alpha, beta_tilde, gamma):
    return matrix_to_quat(euler_to_matrix(alpha, beta_tilde, gamma))


def quat_to_euler(q):
    return matrix_to_euler(quat_to_matrix(q))


# ---------------------------------------------------------------------------
# state-vector conversions between the two integrator routes

EULER_STATE_DIM = 12
QUAT_STATE_DIM = 13

TRAJECTORY_COLUMNS = (
    "t",
    "x",
    "y",
    "z",
    "alpha",
    "beta_tilde",
    "gamma",
    "px",
    "py",
    "pz",
    "p_alpha",
    "p_beta_tilde",
    "p_gamma",
    "energy",
)


def euler_state_to_quat_state(y, inertia):
    """Convert a canonical Euler-route state to the quaternion route.

    The body angular momentum follows from ``L_body = K^-T p_ang``.
    """
    y = np.asarray(y, dtype=float)
    alpha, beta_tilde, gamma = y[3], y[4], y[5]
    K = euler_rate_matrix(beta_tilde, gamma)
    L_body = np.linalg.solve(K.T, y[9:12])
    q = euler_to_quat(alpha, beta_tilde, gamma)
    return np.concatenate([y[0:3], q, y[6:9], L_body])


def quat_state_to_euler_state(y):
    """Inverse of :func:`euler_state_to_quat_state` (fails at the chart
    singularity where K is singular)."""
    y = np.asarray(y, dtype=float)
    q = quat_normalize(y[3:7])
    alpha, beta_tilde, gamma = quat_to_euler(q)
    K = euler_rate_matrix(beta_tilde, gamma)
    p_ang = K.T @ y[10:13]
    return np.concatenate([y[0:3], [alpha, beta_tilde, gamma], y[7:10], p_ang])
