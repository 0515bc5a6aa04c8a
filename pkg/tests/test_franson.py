import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import trapezoid

from conftest import TAU_I, TAU_S, random_settings, random_state
from oracles import fft_jti, quadrature_rate
from ultrafranson.biphoton import GaussianBiphoton, jsi_value, jti_value, temporal_widths
from ultrafranson.franson import (FransonSettings, InterferometerArm, PathTerm,
                                  coincidence_components, coincidence_rate,
                                  coincidence_rate_anticorrelated, gated_rates, jsi_after,
                                  jta_after, jti_after, predicted_visibility, selected_rates,
                                  singles_rate, temporal_marginal_after)


def test_arm_validation():
    assert InterferometerArm(1.0, -1e-300).phi == 0.0
    assert InterferometerArm(1.0, 5 * math.pi).phi == pytest.approx(math.pi)
    with pytest.raises(ValueError):
        InterferometerArm(-0.1)
    with pytest.raises(ValueError):
        InterferometerArm(0.1, math.inf)


def test_referenced_total_phases(spectral_state):
    s = FransonSettings.referenced(spectral_state, TAU_S, TAU_I, 0.3, 1.2)
    th = s.total_phases(spectral_state)
    assert math.cos(th[0] - 0.3) == pytest.approx(1, abs=1e-12)
    assert math.cos(th[1] - 1.2) == pytest.approx(1, abs=1e-12)


def test_path_terms_shift():
    s = FransonSettings(InterferometerArm(0.8), InterferometerArm(0.9))
    assert PathTerm.LONG_LONG.shift(s) == (0.8, 0.9)
    assert PathTerm.SHORT_LONG.shift(s) == (0.0, 0.9)
    assert PathTerm.LONG_SHORT.phase(1.0, 2.0) == 1.0


def test_identity_settings(spectral_state):
    ident = FransonSettings.identity()
    w = np.linspace(-30, 30, 41)
    ws, wi = np.meshgrid(spectral_state.omega_s0 + w, spectral_state.omega_i0 + w, indexing="ij")
    np.testing.assert_allclose(jsi_after(ident, spectral_state, ws, wi),
                               jsi_value(spectral_state, ws, wi), rtol=1e-12)
    t = np.linspace(-1, 1, 41)
    ts, ti = np.meshgrid(t, t, indexing="ij")
    np.testing.assert_allclose(jti_after(ident, spectral_state, ts, ti),
                               jti_value(spectral_state, ts, ti), rtol=1e-12)
    assert coincidence_rate(ident, spectral_state) == pytest.approx(1.0)


def test_fft_oracle_reference_settings(spectral_state):
    s = FransonSettings.referenced(spectral_state, TAU_S, TAU_I, 0.4, 2.0)
    ts, ti, ref = fft_jti(s, spectral_state)
    T_s, T_i = np.meshgrid(ts, ti, indexing="ij")
    model = jti_after(s, spectral_state, T_s, T_i)
    assert np.max(np.abs(model - ref)) / model.max() < 1e-5


def test_jta_after_matches_jti_after():
    rng = np.random.default_rng(11)
    for _ in range(5):
        state, s = random_state(rng), random_settings(rng)
        t = np.linspace(-2, 1, 31)
        ts, ti = np.meshgrid(t, t, indexing="ij")
        np.testing.assert_allclose(np.abs(jta_after(s, state, ts, ti)) ** 2,
                                   jti_after(s, state, ts, ti), rtol=1e-9, atol=1e-14)


def test_quadrature_oracle_reference_settings(spectral_state):
    for phases in [(0, 0), (math.pi, 0), (1.0, 2.5)]:
        s = FransonSettings.referenced(spectral_state, TAU_S, TAU_I, *phases)
        q = quadrature_rate(s, spectral_state, n=1024)
        assert coincidence_rate(s, spectral_state) == pytest.approx(q, rel=1e-8)


def test_rate_phase_sum_dependence(spectral_state):
    r0 = coincidence_rate(FransonSettings.referenced(spectral_state, TAU_S, TAU_I), spectral_state)
    rpi = coincidence_rate(FransonSettings.referenced(spectral_state, TAU_S, TAU_I, math.pi),
                           spectral_state)
    assert (r0 - rpi) / (r0 + rpi) == pytest.approx(
        predicted_visibility(FransonSettings.referenced(spectral_state, TAU_S, TAU_I), spectral_state),
        rel=1e-12)
    assert predicted_visibility(FransonSettings.referenced(spectral_state, TAU_S, TAU_I),
                                spectral_state) == pytest.approx(0.322, abs=1e-3)


def test_anticorrelated_form():
    state = GaussianBiphoton(2500.0, 2300.0, 10.0, 10.0, -0.99)
    for phi_s, phi_i in [(0.0, 0.0), (1.0, -0.3), (2.0, 3.0)]:
        s = FransonSettings(InterferometerArm(0.8, phi_s), InterferometerArm(0.8, phi_i))
        assert coincidence_rate(s, state) == pytest.approx(
            coincidence_rate_anticorrelated(10.0, 0.8, -0.99, 2500.0, 2300.0, phi_s, phi_i),
            abs=1e-12)


def test_tau_zero_example():
    # phi = 0 on both sides, tau = 0: every path adds constructively
    s = FransonSettings.identity()
    state = GaussianBiphoton(2500.0, 2300.0, 5.0, 5.0, 0.0)
    assert coincidence_rate(s, state) == pytest.approx(1.0)
    s = FransonSettings(InterferometerArm(0.0, math.pi), InterferometerArm(0.0))
    assert coincidence_rate(s, state) == pytest.approx(0.0, abs=1e-15)


def test_singles_flat_at_reference_delays(spectral_state):
    for theta in np.linspace(0, 2 * math.pi, 9):
        arm = InterferometerArm(TAU_S, theta - spectral_state.omega_s0 * TAU_S)
        assert abs(singles_rate(arm, spectral_state.sigma_s, spectral_state.omega_s0) - 1) < 1e-15


def test_temporal_marginal_against_jti(spectral_state):
    # idler arm set to identity, so the signal marginal is the idler integral
    arm = InterferometerArm(0.15, 0.7)
    s = FransonSettings(arm, InterferometerArm(0.0))
    tw = temporal_widths(spectral_state)
    ts = np.linspace(-0.6, 0.4, 11)
    ti = np.linspace(-10 * tw.marginal_i, 10 * tw.marginal_i, 4001)
    T_s, T_i = np.meshgrid(ts, ti, indexing="ij")
    numeric = trapezoid(jti_after(s, spectral_state, T_s, T_i), ti, axis=1)
    model = temporal_marginal_after(arm, spectral_state.sigma_s, spectral_state.rho,
                                    spectral_state.omega_s0, ts)
    np.testing.assert_allclose(model, numeric, rtol=1e-8)
    # integrated over time, the marginal is half the relative singles rate
    tt = np.linspace(-4, 4, 8001)
    total = trapezoid(temporal_marginal_after(arm, spectral_state.sigma_s, spectral_state.rho,
                                              spectral_state.omega_s0, tt), tt)
    assert total == pytest.approx(0.5 * singles_rate(arm, spectral_state.sigma_s,
                                                     spectral_state.omega_s0), rel=1e-9)


def test_point_components_match_jti(spectral_state):
    s = FransonSettings.referenced(spectral_state, TAU_S, TAU_I, 0.9, 0.2)
    comp = coincidence_components(s, spectral_state, -0.3, -0.5)
    th = s.total_phases(spectral_state)
    assert comp.value(*th) == pytest.approx(float(jti_after(s, spectral_state, -0.3, -0.5)),
                                            rel=1e-12)
    cc, _, _ = selected_rates(s, spectral_state)
    assert cc == pytest.approx(float(jti_after(s, spectral_state, -TAU_S / 2, -TAU_I / 2)),
                               rel=1e-12)


def test_gated_components_match_numeric_average(temporal_state):
    state = temporal_state
    s = FransonSettings.referenced(state, TAU_S, TAU_I, 0.4, 1.1)
    gate = (0.12, 0.09)
    n = 801
    u = np.linspace(-7, 7, n)
    ts = -TAU_S / 2 + gate[0] * u
    ti = -TAU_I / 2 + gate[1] * u
    T_s, T_i = np.meshgrid(ts, ti, indexing="ij")
    w = np.outer(np.exp(-u**2 / 2), np.exp(-u**2 / 2)) / (2 * math.pi)
    numeric = trapezoid(trapezoid(jti_after(s, state, T_s, T_i) * w, u, axis=1), u)
    th = s.total_phases(state)
    cc, ss, si = gated_rates(s, state, *th, gate_sigma=gate)
    assert cc == pytest.approx(numeric, rel=1e-8)


def test_selected_visibility_matched_limit(spectral_state):
    # matched delays: sigma_s tau_s = sigma_i tau_i
    tau_s = 0.82
    tau_i = tau_s * spectral_state.sigma_s / spectral_state.sigma_i
    s = FransonSettings.referenced(spectral_state, tau_s, tau_i)
    assert predicted_visibility(s, spectral_state, selected=True) == pytest.approx(1.0, abs=1e-6)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_rate_bounds_and_unselected_visibility(seed):
    rng = np.random.default_rng(seed)
    state, s = random_state(rng, rho_max=0.999), random_settings(rng, tau_max=3.0)
    rate = coincidence_rate(s, state)
    assert -1e-15 <= rate <= 1 + 1e-12
    assert predicted_visibility(s, state) <= 0.5
    sel = predicted_visibility(s, state, selected=True)
    assert 0 <= sel <= 1 + 1e-12


@settings(max_examples=40, deadline=None)
@given(st.floats(0, 2 * math.pi), st.floats(0, 2 * math.pi))
def test_rate_periodic_in_phase(phi_s, phi_i):
    state = GaussianBiphoton(2500.0, 2300.0, 7.0, 6.0, -0.8)
    a = FransonSettings(InterferometerArm(0.3, phi_s), InterferometerArm(0.4, phi_i))
    b = FransonSettings(InterferometerArm(0.3, phi_s + 2 * math.pi),
                        InterferometerArm(0.4, phi_i - 2 * math.pi))
    assert coincidence_rate(a, state) == pytest.approx(coincidence_rate(b, state), abs=1e-12)
