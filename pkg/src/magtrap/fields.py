"""Assembled field configurations and field-analysis utilities.

The two hardware configurations studied here:

* a spinning four-magnet platform (square-section bar magnets with
  alternating vertical polarity on a circle) whose near-axis Bz is a
  rotating saddle with a height-dependent amplitude;
* a planar coil pair (concentric loops with opposing currents sized to
  cancel the on-axis field and gradient) producing a pure AC curvature.

Analysis helpers extract saddle curvature profiles from any source by
polynomial fits, evaluate field maps on grids, and check Maxwell
consistency from the gradient tensor.
"""

from __future__ import annotations

import numpy as np

from .constants import B_SAT, MU0
from .sources import CircularLoop, CuboidMagnet, SpunAssembly, Stack

FIELD_MAP_COLUMNS = ("x", "y", "z", "t", "Bx", "By", "Bz")


def four_magnet_platform(side=5e-3, height=16e-3, circle_diameter=20e-3, b_sat=B_SAT):
    """Static four-magnet assembly.

    Bars of square cross-section ``side`` x ``side`` and vertical extent
    ``height`` sit with centers on a circle of ``circle_diameter`` in the
    z = 0 plane: magnetization +z on the x axis, -z on the y axis.  The
    alternating polarity forces Bz to vanish on the axis and leaves a pure
    transverse-saddle curvature there.

    The default height is calibrated so the standard rotor levitates near
    11 mm at an 80 Hz spin rate (see scripts/calibrate_platform.py).
    """
    r = circle_diameter / 2.0
    dims = (side, side, height)
    return Stack(
        [
            CuboidMagnet(dims, np.array([0.0, 0.0, b_sat]), np.array([r, 0.0, 0.0])),
            CuboidMagnet(dims, np.array([0.0, 0.0, b_sat]), np.array([-r, 0.0, 0.0])),
            CuboidMagnet(dims, np.array([0.0, 0.0, -b_sat]), np.array([0.0, r, 0.0])),
            CuboidMagnet(dims, np.array([0.0, 0.0, -b_sat]), np.array([0.0, -r, 0.0])),
        ]
    )


def spinning_platform(omega, **kwargs):
    """Four-magnet platform rotating about z at mechanical rate ``omega``.

    The quadrupole symmetry makes the field pattern repeat at 2*omega.
    """
    return SpunAssembly(four_magnet_platform(**kwargs), omega)


def double_loop(r1, i1):
    """Concentric loop pair: (r1, i1) and (2 r1, -2 i1).

    The outer loop cancels the on-axis field of the inner one (field of a
    loop scales as i/r on axis) while only partially cancelling the
    curvature, leaving d^2Bz/dz^2 = -(9/8) mu0 i1 / r1^3 at the center.
    """
    return Stack(
        [
            CircularLoop(r1, i1),
            CircularLoop(2.0 * r1, -2.0 * i1),
        ]
    )


def double_loop_curvature(i1, r1):
    """Closed-form on-axis d^2Bz/dz^2 of :func:`double_loop` at the center."""
    return -9.0 / 8.0 * MU0 * i1 / r1**3


def double_loop_z2_coefficient(i1, r1):
    """Coefficient of z^2 in the on-axis Bz expansion (= curvature / 2).

    This is the number usually quoted for the design; the trap stiffness
    uses the full second derivative.
    """
    return 0.5 * double_loop_curvature(i1, r1)


def onaxis_curvature_fit(source, halfwidth, npts=41, t=0.0):
    """Numeric on-axis d^2Bz/dz^2 at the origin by quartic polynomial fit.

    Independent cross-check of closed-form curvatures; ``halfwidth`` should
    be a few percent of the source scale for sub-percent agreement.
    """
    z = np.linspace(-halfwidth, halfwidth, npts)
    pts = np.stack([np.zeros(npts), np.zeros(npts), z], axis=-1)
    bz = source.field(pts, t)[:, 2]
    coef = np.polynomial.polynomial.polyfit(z, bz, 4)
    return 2.0 * coef[2]


def transverse_saddle_curvature(source, z, halfwidth=2e-3, npts=21, t=0.0):
    """Signed saddle amplitude B'' at height ``z`` on the axis.

    Defined so that near the axis ``Bz = (B''/2)(x^2 - y^2) + ...``; for a
    source whose on-axis Bz vanishes identically (the alternating-polarity
    platform) this equals -d^2Bz/dy^2, extracted by a quadratic fit along
    the y direction.
    """
    y = np.linspace(-halfwidth, halfwidth, npts)
    pts = np.stack([np.zeros(npts), y, np.full(npts, z)], axis=-1)
    bz = source.field(pts, t)[:, 2]
    coef = np.polynomial.polynomial.polyfit(y, bz, 2)
    return -2.0 * coef[2]


def field_map(source, xs, ys, zs, t=0.0):
    """Evaluate a source on the tensor grid ``xs x ys x zs`` at time ``t``.

    Returns an (N, 7) array with columns :data:`FIELD_MAP_COLUMNS`; points
    where the field is singular (inside source material, on edges) come out
    as NaN and are left as such for the consumer to mask.
    """
    gx, gy, gz = np.meshgrid(np.asarray(xs, float), np.asarray(ys, float), np.asarray(zs, float), indexing="ij")
    pts = np.stack([gx.ravel(), gy.ravel(), gz.ravel()], axis=-1)
    b = source.field(pts, t)
    n = pts.shape[0]
    return np.column_stack([pts, np.full(n, t), b])


def divergence_from_gradient(g):
    """Trace of the field gradient tensor, zero for a physical field."""
    return np.trace(g, axis1=-2, axis2=-1)


def curl_from_gradient(g):
    """Curl components from the antisymmetric part of the gradient tensor."""
    return np.stack(
        [
            g[..., 2, 1] - g[..., 1, 2],
            g[..., 0, 2] - g[..., 2, 0],
            g[..., 1, 0] - g[..., 0, 1],
        ],
        axis=-1,
    )
