"""Assembled configurations and field-analysis helpers."""

import numpy as np
import pytest

from magtrap.constants import MU0
from magtrap.fields import (
    FIELD_MAP_COLUMNS,
    curl_from_gradient,
    divergence_from_gradient,
    double_loop,
    double_loop_curvature,
    double_loop_z2_coefficient,
    field_map,
    four_magnet_platform,
    onaxis_curvature_fit,
    transverse_saddle_curvature,
)
from magtrap.sources import CuboidMagnet, RotatingSaddle


# ---------------------------------------------------------------------------
# double loop


def test_double_loop_cancels_field_and_gradient_on_axis():
    src = double_loop(1e-4, 0.1)
    origin = np.zeros((1, 3))
    b = src.field(origin)[0]
    # on-axis field of (r, i) + (2r, -2i) cancels exactly; the gradient
    # vanishes by symmetry for any coaxial pair
    assert abs(b[2]) < 1e-12 * MU0 * 0.1 / 1e-4
    g = src.gradient(origin)[0]
    assert np.all(np.abs(g) < 1e-7 * MU0 * 0.1 / 1e-8)


def test_double_loop_curvature_closed_form():
    # -(9/8) mu0 i1 / r1^3, scaling as 1/r^3 and linearly in current
    assert double_loop_curvature(0.1, 1e-4) == pytest.approx(
        -9.0 / 8.0 * MU0 * 0.1 / 1e-12, rel=1e-14
    )
    assert double_loop_curvature(0.2, 1e-4) == pytest.approx(
        2 * double_loop_curvature(0.1, 1e-4), rel=1e-14
    )
    assert double_loop_curvature(0.1, 2e-4) == pytest.approx(
        double_loop_curvature(0.1, 1e-4) / 8.0, rel=1e-14
    )


def test_double_loop_z2_coefficient_is_half_the_curvature():
    assert double_loop_z2_coefficient(0.1, 1e-4) == pytest.approx(
        0.5 * double_loop_curvature(0.1, 1e-4), rel=1e-15
    )


def test_onaxis_fit_recovers_double_loop_curvature():
    r1, i1 = 1e-4, 0.1
    fit = onaxis_curvature_fit(double_loop(r1, i1), halfwidth=0.05 * r1)
    assert fit == pytest.approx(double_loop_curvature(i1, r1), rel=5e-3)


# ---------------------------------------------------------------------------
# saddle-curvature extraction


def test_saddle_curvature_exact_on_ideal_saddle():
    bpp = 1e5
    src = RotatingSaddle(bpp, 2 * np.pi * 1000.0)
    got = transverse_saddle_curvature(src, 0.0, halfwidth=1e-3)
    assert got == pytest.approx(bpp, rel=1e-10)


def test_platform_bz_is_saddle_shaped_near_axis(platform_assembly):
    # Bz ~ (B''/2)(x^2 - y^2) near the axis: equal magnitude, opposite
    # sign along the two transverse directions (exact by symmetry); the
    # magnitude carries a percent-level r^4 bias from the default fit
    # window, so that comparison stays loose
    z = 11e-3
    bpp = transverse_saddle_curvature(platform_assembly, z)
    d = 5e-4
    bz_x = platform_assembly.field(np.array([[d, 0.0, z]]))[0, 2]
    bz_y = platform_assembly.field(np.array([[0.0, d, z]]))[0, 2]
    assert bz_x == pytest.approx(-bz_y, rel=1e-10)
    assert bz_x == pytest.approx(0.5 * bpp * d**2, rel=0.1)


def test_saddle_curvature_fit_converges_to_pointwise_derivative(platform_assembly):
    # the quadratic-fit value is a window average over the quartic tower;
    # shrinking the window must converge it onto the stencil derivative
    z = 11e-3
    h = 1e-4
    pts = np.array([[k * h, 0.0, z] for k in (-2, -1, 0, 1, 2)])
    bz = platform_assembly.field(pts)[:, 2]
    stencil = (-bz[0] + 16 * bz[1] - 30 * bz[2] + 16 * bz[3] - bz[4]) / (12 * h * h)
    wide = transverse_saddle_curvature(platform_assembly, z, halfwidth=2e-3)
    narrow = transverse_saddle_curvature(platform_assembly, z, halfwidth=2e-4)
    assert abs(narrow - stencil) < 0.05 * abs(wide - stencil)
    assert narrow == pytest.approx(stencil, rel=2e-3)


def test_platform_polarity_layout():
    asm = four_magnet_platform(circle_diameter=20e-3)
    centers = np.array([m.center for m in asm.sources])
    assert np.allclose(np.linalg.norm(centers, axis=1), 10e-3, rtol=1e-12)
    for m in asm.sources:
        assert isinstance(m, CuboidMagnet)
        on_x_axis = abs(m.center[0]) > abs(m.center[1])
        expected_sign = 1.0 if on_x_axis else -1.0
        assert np.sign(m.magnetization[2]) == expected_sign


# ---------------------------------------------------------------------------
# field maps and gradient helpers


def test_field_map_layout_and_values(platform_assembly):
    xs = [0.0, 1e-3]
    ys = [-1e-3, 0.0, 1e-3]
    zs = [10e-3]
    rows = field_map(platform_assembly, xs, ys, zs, t=0.25)
    assert rows.shape == (6, len(FIELD_MAP_COLUMNS))
    assert np.all(rows[:, 3] == 0.25)
    # x-major ordering: first three rows share x = 0
    assert np.allclose(rows[0:3, 0], 0.0)
    assert np.allclose(rows[3:6, 0], 1e-3)
    # spot-check one entry against a direct evaluation
    b = platform_assembly.field(np.array([[1e-3, -1e-3, 10e-3]]))[0]
    assert np.allclose(rows[3, 4:7], b, rtol=1e-14)


def test_divergence_and_curl_from_synthetic_tensor():
    g = np.arange(1.0, 10.0).reshape(3, 3)
    assert divergence_from_gradient(g) == pytest.approx(15.0)
    assert np.allclose(curl_from_gradient(g), [2.0, -4.0, 2.0])


def test_divergence_and_curl_vanish_for_platform(platform_assembly):
    pts = np.array([[2e-3, -1e-3, 9e-3], [0.0, 4e-3, 12e-3]])
    g = platform_assembly.gradient(pts)
    scale = np.max(np.abs(g))
    assert np.all(np.abs(divergence_from_gradient(g)) < 1e-8 * scale)
    assert np.all(np.abs(curl_from_gradient(g)) < 1e-8 * scale)
