"""Rigid magnetized bodies: mass properties, moments, quadrature grids.

A body is uniformly magnetized at saturation along its body ``-e1`` axis,
so the total moment is ``mu = B_sat * V / mu0`` and the moment direction in
the lab follows the orientation chart (see :mod:`magtrap.state`).

Two shapes cover everything the trap designs need:

* ``Sphere(radius)``
* ``Cuboid(lx, ly, lz)`` with the long (magnetization) axis ``lx`` along
  body e1 and the vertical extent ``lz`` along body e3 at the reference
  orientation.

``quadrature(order)`` returns Gauss-Legendre nodes/weights over the volume
for finite-size force and torque integrals.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .constants import B_SAT, MU0, RHO_MAGNET


@dataclass(frozen=True)
class Sphere:
    radius: float
    density: float = RHO_MAGNET
    b_sat: float = B_SAT

    @property
    def volume(self):
        return 4.0 / 3.0 * np.pi * self.radius**3

    @property
    def mass(self):
        return self.density * self.volume

    @property
    def moment(self):
        """Magnitude of the magnetic moment [A m^2]."""
        return self.b_sat * self.volume / MU0

    @property
    def inertia(self):
        """Principal moments (I1, I2, I3) in body axes."""
        i = 0.4 * self.mass * self.radius**2
        return np.array([i, i, i])

    def quadrature(self, order=4):
        """Gauss-Legendre product rule adapted to the sphere.

        Nodes in body coordinates, weights summing to the volume.  Uses a
        radial*angular product rule exact for smooth integrands.
        """
        xr, wr = np.polynomial.legendre.leggauss(order)
        # radial: integrate r^2 dr on [0, R]
        r = 0.5 * self.radius * (xr + 1.0)
        wr = 0.5 * self.radius * wr * r**2
        xc, wc = np.polynomial.legendre.leggauss(order)  # cos(theta) on [-1, 1]
        phi = 2.0 * np.pi * (np.arange(2 * order) + 0.5) / (2 * order)
        wphi = 2.0 * np.pi / (2 * order)
        nodes, weights = [], []
        for ri, wri in zip(r, wr):
            for ci, wci in zip(xc, wc):
                s = np.sqrt(1.0 - ci**2)
                for p in phi:
                    nodes.append([ri * s * np.cos(p), ri * s * np.sin(p), ri * ci])
                    weights.append(wri * wci * wphi)
        return np.array(nodes), np.array(weights)


@dataclass(frozen=True)
class Cuboid:
    lx: float
    ly: float
    lz: float
    density: float = RHO_MAGNET
    b_sat: float = B_SAT

    @property
    def volume(self):
        return self.lx * self.ly * self.lz

    @property
    def mass(self):
        return self.density * self.volume

    @property
    def moment(self):
        return self.b_sat * self.volume / MU0

    @property
    def inertia(self):
        m = self.mass
        return (
            np.array(
                [
                    self.ly**2 + self.lz**2,
                    self.lx**2 + self.lz**2,
                    self.lx**2 + self.ly**2,
                ]
            )
            * m
            / 12.0
        )

    def quadrature(self, order=4):
        """Tensor-product Gauss-Legendre nodes over the volume."""
        x, w = np.polynomial.legendre.leggauss(order)
        axes = [0.5 * L * x for L in (self.lx, self.ly, self.lz)]
        wts = [0.5 * L * w for L in (self.lx, self.ly, self.lz)]
        gx, gy, gz = np.meshgrid(*axes, indexing="ij")
        wx, wy, wz = np.meshgrid(*wts, indexing="ij")
        nodes = np.stack([gx.ravel(), gy.ravel(), gz.ravel()], axis=-1)
        return nodes, (wx * wy * wz).ravel()


def tube(length, height, density=RHO_MAGNET, b_sat=B_SAT):
    """Bar-shaped rotor: square cross-section of side ``height``, long
    (magnetization) axis of extent ``length``."""
    return Cuboid(length, height, height, density=density, b_sat=b_sat)


def symmetric_top_inertia(body):
    """(I_transverse, I_axial) about body e3, or raise if I1 != I2.

    The Euler-chart Hamiltonian assumes symmetry about body e3; bodies that
    break it (generic cuboids) must use the quaternion route.
    """
    i1, i2, i3 = body.inertia
    if not np.isclose(i1, i2, rtol=1e-12, atol=0.0):
        raise ValueError("body is not symmetric about e3: I1 != I2")
    return i1, i3
