import numpy as np
import pytest

from paramqed import GHZ, MHZ
from paramqed.parametric import (
    Shift,
    chi_parametric_series,
    chi_static,
    classify_regime,
    g_p_from_flux,
    in_guard_band,
    total_shift,
)
from paramqed.model import PumpSpec, SquidFluxModel, flux_derivative

from test_model import flat_system, random_system


# ------------------------------------------------------------- chi_static

def test_chi_static_zero_coupling():
    assert chi_static(0.0, -3.0 * GHZ, -220.0 * MHZ).value == 0.0


def test_chi_static_arithmetic_oracle():
    # (100 / -3000) * (-220 / -3220) MHz, computed term by term
    g, delta, alpha = 10.0 * MHZ, -3000.0 * MHZ, -220.0 * MHZ
    oracle = (100.0 / -3000.0) * (-220.0 / (-220.0 + -3000.0)) * MHZ
    got = chi_static(g, delta, alpha)
    assert not got.flagged
    assert got.value == pytest.approx(oracle, rel=1e-12)
    assert got.value / MHZ == pytest.approx(-0.0022774, abs=1e-7)


def test_chi_static_two_level_limit():
    # alpha -> -inf: the higher transmon level decouples, chi -> g^2/Delta
    g, delta = 10.0 * MHZ, -900.0 * MHZ
    huge_alpha = -1e9 * MHZ
    assert chi_static(g, delta, huge_alpha).value == pytest.approx(
        g**2 / delta, rel=1e-5
    )


def test_chi_static_pole_flag():
    g, alpha = 5.0 * MHZ, -220.0 * MHZ
    assert chi_static(g, -alpha - 2.0 * MHZ, alpha).flagged
    assert not chi_static(g, -alpha - 50.0 * MHZ, alpha).flagged
    assert np.isnan(chi_static(g, -alpha, alpha).value)


# -------------------------------------------------------------- the series

def test_series_term_by_term_oracle():
    g, dp, alpha = 5.0 * MHZ, -50.0 * MHZ, -220.0 * MHZ
    t1 = -220.0 / (-220.0 + -50.0)
    t2 = -(-50.0) / (2 * -220.0 + -50.0)
    t3 = -(-50.0) / (3 * -220.0 + -50.0)
    oracle = (25.0 / -50.0) * (t1 + t2 + t3) * MHZ
    got = chi_parametric_series(g, dp, alpha, m_max=3)
    assert got.value == pytest.approx(oracle, rel=1e-12)
    assert got.value / MHZ == pytest.approx(-0.32117, abs=1e-5)


def test_series_asymptotic_decay():
    # positive start sits beyond the -2a/-3a poles so 10x lands asymptotically
    g, alpha = 5.0 * MHZ, -220.0 * MHZ
    for dp in (-50.0 * MHZ, 800.0 * MHZ):
        near = chi_parametric_series(g, dp, alpha).value
        far = chi_parametric_series(g, 10 * dp, alpha).value
        assert abs(far) < 0.2 * abs(near)


def test_series_sign_flip_across_ef_pole():
    g, alpha = 1.0 * MHZ, -220.0 * MHZ
    eps = 10.0 * MHZ
    left = chi_parametric_series(g, -alpha - eps, alpha).value
    right = chi_parametric_series(g, -alpha + eps, alpha).value
    assert left * right < 0.0


def test_series_m1_equals_static_identification():
    rng = np.random.default_rng(2)
    for _ in range(20):
        g = rng.uniform(0.5, 10.0) * MHZ
        dp = rng.uniform(-400.0, 400.0) * MHZ
        alpha = -rng.uniform(120.0, 300.0) * MHZ
        series = chi_parametric_series(g, dp, alpha, m_max=1)
        static = chi_static(g, dp, alpha)
        assert series.value == static.value or (
            np.isnan(series.value) and np.isnan(static.value)
        )


def test_series_even_in_coupling():
    got_pos = chi_parametric_series(3.0 * MHZ, -70.0 * MHZ, -180.0 * MHZ).value
    got_neg = chi_parametric_series(-3.0 * MHZ, -70.0 * MHZ, -180.0 * MHZ).value
    assert got_pos == got_neg


def test_series_guard_band_flagging():
    g, alpha = 5.0 * MHZ, -220.0 * MHZ
    assert chi_parametric_series(g, 2 * abs(alpha) + 3.0 * MHZ, alpha).flagged
    assert not chi_parametric_series(g, -120.0 * MHZ, alpha).flagged
    assert in_guard_band(-alpha + 19.9 * MHZ, alpha, g)
    with pytest.raises(ValueError):
        chi_parametric_series(g, -50.0 * MHZ, alpha, m_max=0)


# ------------------------------------------------------------- g_p law

def test_gp_zero_at_modulation_extremum():
    fm_sys = random_system(np.random.default_rng(4))
    offset = fm_sys.modes["R"].flux_model.offset
    pump = PumpSpec("R", 2.7 * GHZ, 0.01)
    with pytest.warns(UserWarning):
        assert fm_sys.g_parametric("R", offset, 0.01) == 0.0


def test_gp_doubles_with_amplitude():
    sys_ = random_system(np.random.default_rng(9))
    p1 = PumpSpec("R", 2.7 * GHZ, 0.003)
    p2 = PumpSpec("R", 2.7 * GHZ, 0.006)
    assert g_p_from_flux(sys_, p2, 0.2) == 2.0 * g_p_from_flux(sys_, p1, 0.2)


def test_gp_follows_slope_product_across_biases():
    sys_ = random_system(np.random.default_rng(12))
    pump = PumpSpec("R", 2.7 * GHZ, 0.005)
    biases = (-0.4, -0.37, -0.27)
    rates = [g_p_from_flux(sys_, pump, phi) for phi in biases]
    # independent oracle: the slope-product law evaluated directly
    expect = []
    for phi in biases:
        dq = flux_derivative(sys_.modes["R"].flux_model, phi)
        dc = flux_derivative(sys_.modes["C"].flux_model, phi)
        expect.append(
            sys_.coupler.pump_scale["R"] * 0.005 * np.sqrt(abs(dq * dc))
        )
    np.testing.assert_allclose(rates, expect, rtol=1e-12)
    assert np.argsort(rates).tolist() == np.argsort(expect).tolist()


# ------------------------------------------------------- regime classifier

def test_classify_regime_examples():
    alpha = -220.0 * MHZ
    assert classify_regime(3.0 * MHZ, 0.0, alpha) == "resonant"
    assert classify_regime(2.0 * MHZ, -110.0 * MHZ, alpha) == "straddling"
    assert classify_regime(5.0 * MHZ, 440.0 * MHZ, alpha) == "multiphoton_guard"
    assert classify_regime(2.0 * MHZ, -900.0 * MHZ, alpha) == "dispersive"
    assert classify_regime(2.0 * MHZ, 220.0 * MHZ, alpha) == "resonant"


def test_classify_regime_scale_invariant():
    rng = np.random.default_rng(21)
    for _ in range(30):
        g = rng.uniform(0.1, 8.0) * MHZ
        dp = rng.uniform(-500.0, 700.0) * MHZ
        alpha = -rng.uniform(100.0, 280.0) * MHZ
        scale = rng.uniform(0.01, 100.0)
        assert classify_regime(g, dp, alpha) == classify_regime(
            scale * g, scale * dp, scale * alpha
        )


# ------------------------------------------------------------ total shift

def test_total_shift_no_pumps():
    assert total_shift(Shift(-0.3 * MHZ)).value == -0.3 * MHZ


def test_total_shift_arithmetic():
    out = total_shift(Shift(-0.3 * MHZ), [Shift(0.5 * MHZ)])
    assert out.value == pytest.approx(0.2 * MHZ, rel=1e-12)
    assert not out.flagged


def test_total_shift_cancellation_and_flag_propagation():
    out = total_shift(Shift(0.0), [Shift(0.4 * MHZ), Shift(-0.4 * MHZ)])
    assert out.value == pytest.approx(0.0, abs=1e-18)
    flagged = total_shift(Shift(0.0), [Shift(0.4 * MHZ, flagged=True)])
    assert flagged.flagged
