"""Magnetic field sources.

Every source exposes ``field(points, t=0.0) -> (N, 3)`` and
``gradient(points, t=0.0) -> (N, 3, 3)`` with ``gradient[n, i, j] =
dB_i/dx_j`` at the n-th point.  Analytic gradients are provided wherever a
closed form exists; ``numeric_gradient`` is the central-difference fallback
used by the magnet primitives.

All sources are Maxwell-consistent in free space (divergence- and
curl-free), which the property tests enforce.  Time enters either through
a drive envelope (``cos(Omega t)`` for AC quadrupoles) or through rigid
rotation of a source assembly.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field

import numpy as np
from scipy.special import ellipe, ellipk

from .constants import MU0


def _pts(points):
    p = np.atleast_2d(np.asarray(points, dtype=float))
    if p.shape[-1] != 3:
        raise ValueError("points must have shape (..., 3)")
    return p


def numeric_gradient(field_fn, points, t=0.0, h=None):
    """Central-difference field gradient, ``out[n, i, j] = dB_i/dx_j``."""
    p = _pts(points)
    if h is None:
        scale = max(np.max(np.abs(p)), 1e-6)
        h = 1e-6 * scale
    out = np.empty(p.shape[:1] + (3, 3))
    for j in range(3):
        dp = np.zeros(3)
        dp[j] = h
        out[:, :, j] = (field_fn(p + dp, t) - field_fn(p - dp, t)) / (2 * h)
    return out


class Source:
    """Base: numeric gradient, field must be provided by subclasses."""

    def field(self, points, t=0.0):
        raise NotImplementedError

    def gradient(self, points, t=0.0):
        return numeric_gradient(self.field, points, t)


@dataclass
class Homogeneous(Source):
    """Uniform field ``b0`` (lab frame, Tesla)."""

    b0: np.ndarray

    def field(self, points, t=0.0):
        p = _pts(points)
        return np.broadcast_to(np.asarray(self.b0, dtype=float), p.shape).copy()

    def gradient(self, points, t=0.0):
        p = _pts(points)
        return np.zeros(p.shape[:1] + (3, 3))


@dataclass
class LinearGradient(Source):
    """Axial gradient shim ``B = b2p (z ez - x/2 ex - y/2 ey)``.

    Divergence-free by construction; ``b2p`` is dBz/dz in T/m.
    """

    b2p: float

    def field(self, points, t=0.0):
        p = _pts(points)
        return self.b2p * np.stack([-0.5 * p[:, 0], -0.5 * p[:, 1], p[:, 2]], axis=-1)

    def gradient(self, points, t=0.0):
        p = _pts(points)
        g = np.zeros(p.shape[:1] + (3, 3))
        g[:, 0, 0] = -0.5 * self.b2p
        g[:, 1, 1] = -0.5 * self.b2p
        g[:, 2, 2] = self.b2p
        return g


@dataclass
class Dipole(Source):
    """Point dipole with moment ``m`` [A m^2] at ``position``."""

    m: np.ndarray
    position: np.ndarray = dataclass_field(default_factory=lambda: np.zeros(3))

    def field(self, points, t=0.0):
        p = _pts(points) - np.asarray(self.position, dtype=float)
        r = np.linalg.norm(p, axis=-1, keepdims=True)
        rhat = p / r
        m = np.asarray(self.m, dtype=float)
        mdotr = rhat @ m
        return MU0 / (4 * np.pi) * (3 * mdotr[:, None] * rhat - m) / r**3

    def gradient(self, points, t=0.0):
        p = _pts(points) - np.asarray(self.position, dtype=float)
        r = np.linalg.norm(p, axis=-1)
        rhat = p / r[:, None]
        m = np.asarray(self.m, dtype=float)
        mdotr = rhat @ m
        eye = np.eye(3)
        g = (
            m[None, :, None] * rhat[:, None, :]
            + rhat[:, :, None] * m[None, None, :]
            + mdotr[:, None, None] * (eye[None] - 5 * rhat[:, :, None] * rhat[:, None, :])
        )
        return 3 * MU0 / (4 * np.pi) * g / r[:, None, None] ** 4


@dataclass
class RotatingSaddle(Source):
    """Rotating quadrupole saddle.

    ``Bz = (bpp/2) [(x^2 - y^2) cos(2 Omega t) - 2 x y sin(2 Omega t)]``
    with the harmonic completion that makes the field curl- and
    divergence-free at all z::

        Bx =  bpp z (x cos - y sin)
        By = -bpp z (y cos + x sin)

    ``bpp`` is the transverse curvature d^2Bz/dx^2 at t = 0 [T/m^2]; the
    field pattern rotates clockwise at the mechanical rate ``omega``
    (pattern phase 2*omega*t).
    """

    bpp: float
    omega: float

    def field(self, points, t=0.0):
        p = _pts(points)
        x, y, z = p[:, 0], p[:, 1], p[:, 2]
        c, s = np.cos(2 * self.omega * t), np.sin(2 * self.omega * t)
        bx = self.bpp * z * (x * c - y * s)
        by = -self.bpp * z * (y * c + x * s)
        bz = 0.5 * self.bpp * ((x**2 - y**2) * c - 2 * x * y * s)
        return np.stack([bx, by, bz], axis=-1)

    def gradient(self, points, t=0.0):
        p = _pts(points)
        x, y, z = p[:, 0], p[:, 1], p[:, 2]
        c, s = np.cos(2 * self.omega * t), np.sin(2 * self.omega * t)
        g = np.zeros(p.shape[:1] + (3, 3))
        g[:, 0, 0] = self.bpp * z * c
        g[:, 0, 1] = -self.bpp * z * s
        g[:, 0, 2] = self.bpp * (x * c - y * s)
        g[:, 1, 0] = -self.bpp * z * s
        g[:, 1, 1] = -self.bpp * z * c
        g[:, 1, 2] = -self.bpp * (y * c + x * s)
        g[:, 2, 0] = self.bpp * (x * c - y * s)
        g[:, 2, 1] = -self.bpp * (y * c + x * s)
        g[:, 2, 2] = 0.0
        return g


@dataclass
class AxialACQuadrupole(Source):
    """AC quadrupole of a planar coil pair, symmetric about the z axis.

    ``B = (b1pp/2) cos(Omega t) [ (z^2 - (x^2+y^2)/2) ez - xz ex - yz ey ]``

    ``b1pp`` is the on-axis curvature d^2Bz/dz^2 at the drive maximum.
    """

    b1pp: float
    omega: float

    def _envelope(self, t):
        return np.cos(self.omega * t)

    def field(self, points, t=0.0):
        p = _pts(points)
        x, y, z = p[:, 0], p[:, 1], p[:, 2]
        a = 0.5 * self.b1pp * self._envelope(t)
        return np.stack([-a * x * z, -a * y * z, a * (z**2 - 0.5 * (x**2 + y**2))], axis=-1)

    def gradient(self, points, t=0.0):
        p = _pts(points)
        x, y, z = p[:, 0], p[:, 1], p[:, 2]
        a = 0.5 * self.b1pp * self._envelope(t)
        g = np.zeros(p.shape[:1] + (3, 3))
        g[:, 0, 0] = -a * z
        g[:, 0, 2] = -a * x
        g[:, 1, 1] = -a * z
        g[:, 1, 2] = -a * y
        g[:, 2, 0] = -a * x
        g[:, 2, 1] = -a * y
        g[:, 2, 2] = 2 * a * z
        return g


def _triad_for_normal(normal):
    """Rows (u, v, w) of the rotation taking lab coords to a frame whose
    z-axis is ``normal``.  Deterministic tie-breaking for the transverse
    pair."""
    w = np.asarray(normal, dtype=float)
    w = w / np.linalg.norm(w)
    a = np.array([1.0, 0.0, 0.0]) if abs(w[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    u = np.cross(w, a)
    u /= np.linalg.norm(u)
    v = np.cross(w, u)
    return np.stack([u, v, w])


@dataclass
class CircularLoop(Source):
    """Filamentary current loop of ``radius`` carrying ``current``,
    centered at ``center`` with the loop normal along ``normal``.

    ``drive_omega > 0`` makes the current oscillate as
    ``cos(drive_omega t + drive_phase)``.  Off-axis field via complete
    elliptic integrals; the on-axis limit is handled analytically.
    """

    radius: float
    current: float
    center: np.ndarray = dataclass_field(default_factory=lambda: np.zeros(3))
    normal: np.ndarray = dataclass_field(
        default_factory=lambda: np.array([0.0, 0.0, 1.0]))
    drive_omega: float = 0.0
    drive_phase: float = 0.0

    def __post_init__(self):
        self._rot = _triad_for_normal(self.normal)
        self._aligned = np.allclose(self._rot, np.eye(3))

    def _current(self, t):
        if self.drive_omega == 0.0:
            return self.current
        return self.current * np.cos(self.drive_omega * t + self.drive_phase)

    def field(self, points, t=0.0):
        p = _pts(points) - np.asarray(self.center, dtype=float)
        if not self._aligned:
            p = p @ self._rot.T
        x, y, z = p[:, 0], p[:, 1], p[:, 2]
        rho = np.hypot(x, y)
        R, I = self.radius, self._current(t)
        bz = np.empty_like(rho)
        brho = np.zeros_like(rho)
        on_axis = rho < 1e-12 * R
        if np.any(on_axis):
            za = z[on_axis]
            bz[on_axis] = MU0 * I * R**2 / (2 * (R**2 + za**2) ** 1.5)
        off = ~on_axis
        if np.any(off):
            ro, zo = rho[off], z[off]
            d2 = (R + ro) ** 2 + zo**2
            m = 4 * R * ro / d2  # scipy parameter m = k^2
            K, E = ellipk(m), ellipe(m)
            den = (R - ro) ** 2 + zo**2
            pref = MU0 * I / (2 * np.pi * np.sqrt(d2))
            bz[off] = pref * (K + (R**2 - ro**2 - zo**2) / den * E)
            brho[off] = pref * zo / ro * (-K + (R**2 + ro**2 + zo**2) / den * E)
        with np.errstate(invalid="ignore"):
            cphi = np.where(rho > 0, x / np.where(rho > 0, rho, 1.0), 0.0)
            sphi = np.where(rho > 0, y / np.where(rho > 0, rho, 1.0), 0.0)
        b = np.stack([brho * cphi, brho * sphi, bz], axis=-1)
        if not self._aligned:
            b = b @ self._rot
        return b


@dataclass
class CuboidMagnet(Source):
    """Uniformly magnetized rectangular prism.

    ``dims = (lx, ly, lz)`` are the full edge lengths, ``magnetization`` is
    the vector mu0*M in Tesla (components along the prism's own axes, which
    coincide with the lab axes; rotate via :class:`SpunAssembly` or by
    composing points externally).  Closed-form surface-charge solution;
    outside the body ``B = mu0 H``, inside ``B = mu0 (H + M)``.
    """

    dims: tuple
    magnetization: np.ndarray
    center: np.ndarray = dataclass_field(default_factory=lambda: np.zeros(3))

    def field(self, points, t=0.0):
        p = _pts(points) - np.asarray(self.center, dtype=float)
        mag = np.asarray(self.magnetization, dtype=float)
        b = np.zeros_like(p)
        # solve per magnetization component by permuting axes onto z
        for axis in range(3):
            if mag[axis] == 0.0:
                continue
            perm = {0: (1, 2, 0), 1: (2, 0, 1), 2: (0, 1, 2)}[axis]
            inv = np.argsort(perm)
            h = _cuboid_h_mz(p[:, perm], tuple(np.asarray(self.dims)[list(perm)]), 1.0)
            b += mag[axis] * h[:, inv]
        inside = np.all(np.abs(p) <= 0.5 * np.asarray(self.dims), axis=-1)
        b[inside] += mag
        return b


def _cuboid_h_mz(points, dims, m):
    """mu0*H of a prism magnetized along +z with mu0*M = m (T).

    Principal-branch arctan is required: the atan2 variant wraps across the
    charged faces and corrupts the interior solution.
    """
    a, b, c = dims
    X, Y, Z = points[:, 0], points[:, 1], points[:, 2]
    hx = np.zeros_like(X)
    hy = np.zeros_like(X)
    hz = np.zeros_like(X)
    with np.errstate(divide="ignore", invalid="ignore"):
        for i in (0, 1):
            xs = X + (-1) ** i * a / 2
            for j in (0, 1):
                ys = Y + (-1) ** j * b / 2
                for k in (0, 1):
                    zs = Z + (-1) ** k * c / 2
                    r = np.sqrt(xs**2 + ys**2 + zs**2)
                    sg = (-1) ** (i + j + k)
                    hx = hx + sg * np.log(ys + r)
                    hy = hy + sg * np.log(xs + r)
                    hz = hz - sg * np.arctan(xs * ys / (zs * r))
    out = np.stack([hx, hy, hz], axis=-1)
    return m / (4 * np.pi) * out


@dataclass
class Stack(Source):
    """Superposition of sources."""

    sources: list

    def field(self, points, t=0.0):
        p = _pts(points)
        out = np.zeros_like(p)
        for s in self.sources:
            out = out + s.field(p, t)
        return out

    def gradient(self, points, t=0.0):
        p = _pts(points)
        out = np.zeros(p.shape[:1] + (3, 3))
        for s in self.sources:
            out = out + s.gradient(p, t)
        return out


@dataclass
class SpunAssembly(Source):
    """A source assembly rigidly rotating about the lab z axis at ``omega``.

    ``B(r, t) = Rz(omega t) B_static(Rz(-omega t) r)``.
    """

    static: Source
    omega: float

    def _rz(self, t):
        c, s = np.cos(self.omega * t), np.sin(self.omega * t)
        return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])

    def field(self, points, t=0.0):
        p = _pts(points)
        R = self._rz(t)
        return self.static.field(p @ R, t) @ R.T

    def gradient(self, points, t=0.0):
        p = _pts(points)
        R = self._rz(t)
        g = self.static.gradient(p @ R, t)
        return np.einsum("ia,nab,jb->nij", R, g, R)
