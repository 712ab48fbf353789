"""Rigid-body data: masses, moments, inertia, volume quadrature."""

import numpy as np
import pytest
from hypothesis import given, strategies as st

from magtrap.bodies import Cuboid, Sphere, symmetric_top_inertia, tube
from magtrap.constants import MU0


def test_sphere_mass_moment_inertia():
    s = Sphere(1e-6, density=7e3, b_sat=1.0)
    vol = 4.0 / 3.0 * np.pi * 1e-18
    assert s.volume == pytest.approx(vol, rel=1e-14)
    assert s.mass == pytest.approx(7e3 * vol, rel=1e-14)
    assert s.mass == pytest.approx(2.93215e-14, rel=1e-5)
    assert s.moment == pytest.approx(vol / MU0, rel=1e-14)
    assert s.moment == pytest.approx(3.33333e-12, rel=1e-5)
    assert np.allclose(s.inertia, 0.4 * s.mass * 1e-12)


def test_cuboid_mass_and_inertia():
    c = Cuboid(10e-3, 4e-3, 4e-3, density=7e3, b_sat=1.0)
    assert c.mass == pytest.approx(7e3 * 10e-3 * 4e-3 * 4e-3, rel=1e-14)
    ix, iy, iz = c.inertia
    m = c.mass
    assert ix == pytest.approx(m * (16e-6 + 16e-6) / 12, rel=1e-12)
    assert iy == pytest.approx(m * (100e-6 + 16e-6) / 12, rel=1e-12)
    assert iy == pytest.approx(iz, rel=1e-14)


def test_tube_is_square_bar():
    t = tube(10e-3, 4e-3)
    assert (t.lx, t.ly, t.lz) == (10e-3, 4e-3, 4e-3)


def test_symmetric_top_inertia():
    s = Sphere(1e-6)
    it, ia = symmetric_top_inertia(s)
    assert it == ia == pytest.approx(s.inertia[0], rel=1e-14)
    with pytest.raises(ValueError):
        symmetric_top_inertia(Cuboid(1e-3, 2e-3, 3e-3))


@pytest.mark.parametrize("body", [Sphere(1e-6), Cuboid(10e-3, 4e-3, 4e-3)],
                         ids=["sphere", "cuboid"])
@pytest.mark.parametrize("order", [2, 3, 4])
def test_quadrature_weights_sum_to_volume(body, order):
    nodes, weights = body.quadrature(order)
    assert weights.sum() == pytest.approx(body.volume, rel=1e-10)
    # first moments vanish by symmetry
    assert np.allclose(weights @ nodes, 0.0, atol=1e-12 * body.volume)


def test_quadrature_second_moments_match_inertia():
    # inertia: I_x = rho * integral (y^2 + z^2) dV, etc.
    for body in (Sphere(1e-6), Cuboid(10e-3, 4e-3, 4e-3)):
        nodes, weights = body.quadrature(6)
        sq = weights @ nodes**2
        i_numeric = body.density * np.array(
            [sq[1] + sq[2], sq[0] + sq[2], sq[0] + sq[1]])
        assert np.allclose(i_numeric, body.inertia, rtol=1e-8)


def test_quadrature_integrates_smooth_polynomial_exactly():
    c = Cuboid(2e-3, 3e-3, 1e-3)
    nodes, weights = c.quadrature(4)
    # integral of x^2 y^2 over the box has a closed form
    val = weights @ (nodes[:, 0] ** 2 * nodes[:, 1] ** 2)
    lx, ly, lz = c.lx, c.ly, c.lz
    exact = (lx**3 / 12) * (ly**3 / 12) * lz
    assert val == pytest.approx(exact, rel=1e-12)


@given(st.floats(min_value=1e-7, max_value=1e-2))
def test_sphere_moment_to_mass_ratio_is_size_independent(radius):
    s = Sphere(radius, density=7e3, b_sat=1.0)
    assert s.moment / s.mass == pytest.approx(1.0 / (MU0 * 7e3), rel=1e-12)
