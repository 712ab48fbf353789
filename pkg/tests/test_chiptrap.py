"""Chip-trap design numbers against independently derived expectations."""

import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from magtrap import chiptrap
from magtrap.constants import MU0

TAU = 2 * np.pi

# nominal design set used throughout
B1PP = 1e5
OMEGA = TAU * 2000.0
B0 = 1e-2
RADIUS = 1e-6


def test_q_factors_nominal():
    qz, qx = chiptrap.q_factors(B1PP, OMEGA)
    assert qz == pytest.approx(2 * 1e5 * 1.0 / (MU0 * 7e3 * OMEGA**2), rel=1e-12)
    assert qz == pytest.approx(0.14398, rel=1e-4)
    assert qx == pytest.approx(-qz / 2, rel=1e-12)


def test_q_factor_at_reduced_drive():
    qz, _ = chiptrap.q_factors(B1PP, TAU * 1700.0)
    assert qz == pytest.approx(0.19928, rel=1e-4)


def test_drive_for_q_inverts_q_factors():
    omega = chiptrap.drive_for_q(0.3, B1PP)
    qz, _ = chiptrap.q_factors(B1PP, omega)
    assert qz == pytest.approx(0.3, rel=1e-12)


def test_secular_frequencies_nominal():
    qz, _ = chiptrap.q_factors(B1PP, OMEGA)
    wz, wx = chiptrap.secular_frequencies(OMEGA, qz)
    assert wz / TAU == pytest.approx(101.809, rel=1e-4)
    assert wx / TAU == pytest.approx(50.905, rel=1e-4)
    assert wz == pytest.approx(2 * wx, rel=1e-12)
    # the variant bookkeeping differs by exactly a factor of two
    wz2, wx2 = chiptrap.secular_frequencies_variant(OMEGA, qz)
    assert wz2 == pytest.approx(2 * wz, rel=1e-12)
    assert wx2 == pytest.approx(2 * wx, rel=1e-12)


def test_libration_frequency_nominal():
    wl = chiptrap.libration_frequency(B0, RADIUS)
    assert wl / TAU == pytest.approx(2.68310e5, rel=1e-4)
    # matches sqrt(5/2 B0 Bsat / (mu0 rho a^2)) exactly
    assert wl == pytest.approx(np.sqrt(2.5 * B0 / (MU0 * 7e3 * RADIUS**2)), rel=1e-12)


def test_shim_gradient_and_alternate():
    b2p = chiptrap.shim_gradient()
    assert b2p == pytest.approx(MU0 * 7e3 * 9.8 / 1.0, rel=1e-12)
    assert b2p == pytest.approx(8.62053e-2, rel=1e-4)
    assert chiptrap.SHIM_GRADIENT_ALTERNATE == 8.0e-2


def test_coupling_frequency_nominal():
    wc = chiptrap.coupling_frequency(chiptrap.shim_gradient(), RADIUS)
    assert wc / TAU == pytest.approx(626.496, rel=1e-4)


def test_coupling_negligible_is_strict_and_physical():
    qz, _ = chiptrap.q_factors(B1PP, OMEGA)
    _, wx = chiptrap.secular_frequencies(OMEGA, qz)
    wl = chiptrap.libration_frequency(B0, RADIUS)
    wc = chiptrap.coupling_frequency(chiptrap.shim_gradient(), RADIUS)
    # nominal numbers: 10 wc^2 = 1.55e8 < wx*wl = 5.39e8
    assert 10 * wc**2 < wx * wl
    assert chiptrap.coupling_negligible(wc, wx, wl)
    # a vanishing coupling is trivially negligible
    assert chiptrap.coupling_negligible(0.0, wx, wl)
    # boundary is excluded
    edge = np.sqrt(wx * wl / 10)
    assert not chiptrap.coupling_negligible(edge, wx, wl)


def test_gravity_sag_nominal():
    qz, _ = chiptrap.q_factors(B1PP, OMEGA)
    wz, _ = chiptrap.secular_frequencies(OMEGA, qz)
    sag = chiptrap.gravity_sag(wz)
    assert sag == pytest.approx(-23.949e-6, rel=1e-4)
    assert sag < 0


def test_wire_current_density_inclusive_boundary():
    j, ok = chiptrap.current_density_check(0.1, 50e-6, 2e-6)
    assert j == pytest.approx(1e5, rel=1e-12)
    assert ok  # boundary value passes
    j2, ok2 = chiptrap.current_density_check(-0.2, 50e-6, 2e-6)
    assert j2 == pytest.approx(2e5, rel=1e-12)  # sign dropped
    assert not ok2


def test_induced_current_ratio_nominal():
    ratio = chiptrap.induced_current_ratio(OMEGA)
    assert ratio == pytest.approx(1.73705e-5, rel=1e-4)
    assert ratio == pytest.approx(MU0 * 4.4e7 * 1e-10 * OMEGA / 4, rel=1e-12)


def test_eddy_power_nominal():
    p = chiptrap.eddy_power(OMEGA, RADIUS, B1PP)
    assert p == pytest.approx(6.9482e-29, rel=1e-4)
    # the published order-of-magnitude statement
    assert 1e-29 < p < 1e-27


def test_design_validation():
    with pytest.raises(ValueError):
        chiptrap.ChipDesign(r1=2e-4, r2=1e-4)
    with pytest.raises(ValueError):
        chiptrap.ChipDesign(r1=-1e-4, r2=2e-4)


def test_null_ratio_deviation_zero_at_nominal():
    d = chiptrap.ChipDesign()
    assert d.null_ratio_deviation() == pytest.approx(0.0, abs=1e-12)


def test_loop_curvature_closed_form_vs_fit():
    d = chiptrap.ChipDesign()
    coeff = chiptrap.loop_curvature(d)
    assert coeff == pytest.approx(-9.0 / 16.0 * MU0 * 0.1 / 1e-12, rel=1e-12)
    assert coeff == pytest.approx(-7.0686e4, rel=1e-3)
    # numeric fit agreement within the design budget of 0.5 percent
    rep = chiptrap.design_report(d)
    fit = rep["loop_z2_coefficient_fit_t_per_m2"]
    assert abs(fit - coeff) / abs(coeff) < 5e-3


def test_loop_curvature_off_null_uses_fit():
    d = chiptrap.ChipDesign(i2=-0.15)  # breaks the null ratio
    coeff = chiptrap.loop_curvature(d)
    closed = -9.0 / 16.0 * MU0 * 0.1 / 1e-12
    assert coeff != pytest.approx(closed, rel=1e-6)
    assert np.isfinite(coeff)


def test_design_report_keys_flags_and_roundtrip(tmp_path):
    d = chiptrap.ChipDesign()
    rep = chiptrap.design_report(d)
    for key in (
        "q_z", "secular_z_hz", "secular_x_hz", "libration_hz",
        "coupling_hz", "b2p_t_per_m", "b2p_alternate_t_per_m",
        "sag_m", "sag_shimmed_m", "loop_z2_coefficient_t_per_m2",
        "loop_second_derivative_t_per_m2", "induced_current_ratio",
        "eddy_power_w", "j1_a_per_cm2", "j2_a_per_cm2", "flags",
    ):
        assert key in rep, key
    assert all(rep["flags"].values())
    assert rep["secular_z_hz"] == pytest.approx(101.809, rel=1e-4)
    # serialized form loads back identically
    path = tmp_path / "report.json"
    chiptrap.report_to_json(rep, str(path))
    assert json.loads(path.read_text())["q_z"] == rep["q_z"]


def test_low_drive_flags_trip():
    d = chiptrap.ChipDesign(drive_omega=TAU * 500.0)
    rep = chiptrap.design_report(d)
    assert rep["q_z"] > chiptrap.MATHIEU_FIRST_ZONE_Q
    assert not rep["flags"]["mathieu_stable"]
    assert not rep["flags"]["secular_valid"]


@given(st.floats(min_value=1e3, max_value=1e7),
       st.floats(min_value=TAU * 100, max_value=TAU * 100000))
def test_q_scales_inverse_square_with_drive(b1pp, omega):
    qz, qx = chiptrap.q_factors(b1pp, omega)
    qz2, _ = chiptrap.q_factors(b1pp, 2 * omega)
    assert qz2 == pytest.approx(qz / 4, rel=1e-9)
    assert qx == pytest.approx(-qz / 2, rel=1e-9)
    assert qz > 0


@given(st.floats(min_value=TAU * 500, max_value=TAU * 50000))
def test_secular_ratio_is_two_for_any_drive(omega):
    qz, _ = chiptrap.q_factors(B1PP, omega)
    wz, wx = chiptrap.secular_frequencies(omega, qz)
    assert wz == pytest.approx(2 * wx, rel=1e-9)


def test_sag_shimmed_is_negligible():
    rep = chiptrap.design_report(chiptrap.ChipDesign())
    assert abs(rep["sag_shimmed_m"]) < 1e-6
