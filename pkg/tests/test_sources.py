"""Field sources: closed forms, Maxwell consistency, composition."""

import numpy as np
import pytest
from hypothesis import given, strategies as st

from magtrap.constants import MU0
from magtrap.fields import (
    curl_from_gradient,
    divergence_from_gradient,
    four_magnet_platform,
    spinning_platform,
)
from magtrap.sources import (
    AxialACQuadrupole,
    CircularLoop,
    CuboidMagnet,
    Dipole,
    Homogeneous,
    LinearGradient,
    RotatingSaddle,
    Stack,
    numeric_gradient,
)

RNG = np.random.default_rng(20240817)


def random_points(n, scale=1e-3, keepout=None):
    pts = RNG.uniform(-scale, scale, size=(n, 3))
    if keepout is not None:
        pts = pts[np.linalg.norm(pts, axis=1) > keepout]
    return pts


ANALYTIC_SOURCES = [
    Homogeneous((1e-2, -3e-3, 5e-3)),
    LinearGradient(8.6e-2),
    RotatingSaddle(1e5, 2 * np.pi * 1000),
    AxialACQuadrupole(1e5, 2 * np.pi * 2000),
]


@pytest.mark.parametrize("source", ANALYTIC_SOURCES,
                         ids=lambda s: type(s).__name__)
@pytest.mark.parametrize("t", [0.0, 1.37e-4])
def test_analytic_sources_divergence_and_curl_free(source, t):
    pts = random_points(100)
    g = source.gradient(pts, t)
    b_scale = max(np.max(np.abs(source.field(pts, t))), 1e-12)
    assert np.max(np.abs(divergence_from_gradient(g))) * 1e-3 / b_scale < 1e-6
    assert np.max(np.abs(curl_from_gradient(g))) * 1e-3 / b_scale < 1e-6


@pytest.mark.parametrize("source", ANALYTIC_SOURCES,
                         ids=lambda s: type(s).__name__)
def test_analytic_gradients_match_numeric(source):
    pts = random_points(20)
    g = source.gradient(pts, 3e-5)
    gn = numeric_gradient(lambda p, t=0.0: source.field(p, t), pts, 3e-5)
    assert np.allclose(g, gn, rtol=1e-5, atol=1e-7)


def test_dipole_closed_form_on_axis():
    m = np.array([0.0, 0.0, 2.5e-3])
    d = Dipole(m)
    z = 7e-3
    b = d.field([(0, 0, z)])[0]
    expected = MU0 * 2 * m[2] / (4 * np.pi * z**3)
    assert b[2] == pytest.approx(expected, rel=1e-12)
    assert abs(b[0]) < 1e-18 and abs(b[1]) < 1e-18


def test_dipole_divergence_curl_free():
    d = Dipole((1e-3, -2e-3, 3e-3))
    pts = random_points(100, keepout=2e-4)
    g = d.gradient(pts)
    b_scale = np.max(np.abs(d.field(pts)))
    assert np.max(np.abs(divergence_from_gradient(g))) * 1e-4 / b_scale < 1e-6
    assert np.max(np.abs(curl_from_gradient(g))) * 1e-4 / b_scale < 1e-6


def test_loop_on_axis_closed_form():
    loop = CircularLoop(1e-4, 0.1)
    for z in (0.0, 5e-5, 2e-4):
        b = loop.field([(0, 0, z)])[0]
        expected = MU0 * 0.1 * (1e-4) ** 2 / (2 * ((1e-4) ** 2 + z**2) ** 1.5)
        assert b[2] == pytest.approx(expected, rel=1e-10)
        assert abs(b[0]) < 1e-15 * abs(b[2])


def test_loop_rotation_consistency():
    # a loop with normal x, probed along x, equals a z-loop probed along z
    lz = CircularLoop(1e-4, 0.1)
    lx = CircularLoop(1e-4, 0.1, normal=(1, 0, 0))
    z = 3e-5
    bz = lz.field([(0, 0, z)])[0]
    bx = lx.field([(z, 0, 0)])[0]
    assert bx[0] == pytest.approx(bz[2], rel=1e-12)
    assert abs(bx[1]) < 1e-15 and abs(bx[2]) < 1e-15


def test_loop_drive_envelope():
    loop = CircularLoop(1e-4, 0.1, drive_omega=2 * np.pi * 2000)
    pts = random_points(5, scale=2e-4)
    b0 = CircularLoop(1e-4, 0.1).field(pts)
    t = 1.1e-4
    bt = loop.field(pts, t)
    assert np.allclose(bt, b0 * np.cos(2 * np.pi * 2000 * t), rtol=1e-12)


def test_loop_divergence_curl_free_off_axis():
    loop = CircularLoop(1e-4, 0.1, center=(2e-5, -1e-5, 3e-5),
                        normal=(0.3, -0.4, 0.866))
    pts = random_points(100, scale=5e-4)
    # stay away from the wire itself
    keep = np.abs(np.linalg.norm(pts[:, :2], axis=1) - 1e-4) > 2e-5
    pts = pts[keep]
    g = loop.gradient(pts)
    b_scale = np.max(np.abs(loop.field(pts)))
    assert np.max(np.abs(divergence_from_gradient(g))) * 1e-4 / b_scale < 1e-6
    assert np.max(np.abs(curl_from_gradient(g))) * 1e-4 / b_scale < 1e-6


def test_cuboid_center_interior_field():
    # uniformly magnetized cube (mu0 M = 1 T): B at center = (2/3) mu0 M
    c = CuboidMagnet((4e-3, 4e-3, 4e-3), (0, 0, 1.0))
    b = c.field([(0, 0, 0)])[0]
    assert b[2] == pytest.approx(2.0 / 3.0, rel=1e-10)
    assert abs(b[0]) < 1e-12 and abs(b[1]) < 1e-12


def test_cuboid_far_field_approaches_dipole_second_order():
    dims = (2e-3, 3e-3, 1.5e-3)
    vol = np.prod(dims)
    c = CuboidMagnet(dims, (0.0, 0.0, 1.0))
    d = Dipole((0.0, 0.0, vol / MU0))  # same total moment M V = Br V / mu0
    direction = np.array([0.6, 0.64, 0.48])
    direction /= np.linalg.norm(direction)
    errs = []
    rs = np.array([20e-3, 40e-3, 80e-3])
    for r in rs:
        p = direction * r
        bc = c.field([p])[0]
        bd = d.field([p])[0]
        errs.append(np.linalg.norm(bc - bd) / np.linalg.norm(bd))
    errs = np.array(errs)
    # relative error should fall like 1/r^2 (doubling r -> /4)
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.25)
    assert errs[1] / errs[2] == pytest.approx(4.0, rel=0.25)


def test_cuboid_divergence_curl_free_outside():
    c = CuboidMagnet((5e-3, 5e-3, 16e-3), (0, 0, 1.0), center=(10e-3, 0, 0))
    pts = random_points(200, scale=30e-3)
    inside = (np.abs(pts[:, 0] - 10e-3) < 3.5e-3) & (np.abs(pts[:, 1]) < 3.5e-3) & (np.abs(pts[:, 2]) < 9e-3)
    pts = pts[~inside]
    g = c.gradient(pts)
    b_scale = np.max(np.abs(c.field(pts)))
    assert np.max(np.abs(divergence_from_gradient(g))) * 1e-3 / b_scale < 1e-6
    assert np.max(np.abs(curl_from_gradient(g))) * 1e-3 / b_scale < 1e-6


def test_stack_superposition():
    s1 = Homogeneous((1e-2, 0, 0))
    s2 = Dipole((0, 0, 1e-3))
    stack = Stack([s1, s2])
    pts = random_points(30, keepout=3e-4)
    assert np.allclose(stack.field(pts), s1.field(pts) + s2.field(pts), rtol=1e-14)
    assert np.allclose(stack.gradient(pts), s1.gradient(pts) + s2.gradient(pts), rtol=1e-14)


def test_platform_c4_antisymmetry(platform_assembly):
    # rotating the probe by 90 degrees about z flips the field sign
    pts = random_points(50, scale=15e-3)
    pts[:, 2] = np.abs(pts[:, 2]) + 9e-3  # stay above the magnets
    rot = np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])
    b1 = platform_assembly.field(pts)
    b2 = platform_assembly.field(pts @ rot.T)
    assert np.allclose(b2, -(b1 @ rot.T), rtol=1e-9, atol=1e-12)


def test_platform_field_vanishes_on_axis(platform_assembly):
    zs = np.linspace(9e-3, 30e-3, 7)
    pts = np.column_stack([np.zeros_like(zs), np.zeros_like(zs), zs])
    b = platform_assembly.field(pts)
    assert np.max(np.abs(b)) < 1e-12


def test_spinning_platform_rotation_identity(platform_assembly):
    omega = 2 * np.pi * 80.0
    spun = spinning_platform(omega)
    t = 2.3e-3
    phi = omega * t
    c, s = np.cos(phi), np.sin(phi)
    rot = np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
    pts = random_points(40, scale=15e-3)
    pts[:, 2] = np.abs(pts[:, 2]) + 9e-3
    # B_spun(r, t) = R B_static(R^T r)
    expected = platform_assembly.field(pts @ rot) @ rot.T
    assert np.allclose(spun.field(pts, t), expected, rtol=1e-12, atol=1e-15)


def test_spinning_platform_time_periodicity(platform_assembly):
    omega = 2 * np.pi * 80.0
    spun = spinning_platform(omega)
    pts = random_points(10, scale=12e-3)
    pts[:, 2] = np.abs(pts[:, 2]) + 9e-3
    period = 2 * np.pi / omega
    assert np.allclose(spun.field(pts, 0.0), spun.field(pts, period), rtol=1e-9, atol=1e-15)
    # quarter turn flips the sign (C4 antisymmetry in time)
    assert np.allclose(spun.field(pts, 0.0), -spun.field(pts, period / 4), rtol=1e-9, atol=1e-15)


@given(st.floats(min_value=-1.0, max_value=1.0),
       st.floats(min_value=-1.0, max_value=1.0),
       st.floats(min_value=-1.0, max_value=1.0))
def test_loop_normal_any_direction_keeps_axis_field(nx, ny, nz):
    n = np.array([nx, ny, nz])
    norm = np.linalg.norm(n)
    if norm < 1e-3:
        return
    n /= norm
    loop = CircularLoop(1e-4, 0.1, normal=n)
    b = loop.field([n * 5e-5])[0]
    bz_ref = CircularLoop(1e-4, 0.1).field([(0, 0, 5e-5)])[0][2]
    assert np.dot(b, n) == pytest.approx(bz_ref, rel=1e-9)
    assert np.linalg.norm(b - np.dot(b, n) * n) < 1e-9 * abs(bz_ref)
