"""Fourier reference pricer tests: Heston call/put/greeks, the
branch-corrected logarithm, the OU-volatility pricer and the adaptive
quadrature."""

import cmath
import dataclasses
import math
import random

import numpy as np
import pytest

from kmseries import closedform, fourier, mc
from kmseries.fourier import (BranchTracker, QuadratureError, QuadratureSpec,
                              corrected_log, integrate_semi_infinite)
from kmseries.models import ModelParams
from kmseries.reference import (HESTON_CONVERGENCE_PARAMS, HESTON_TABLE_PARAMS,
                                SZ_STRESS_PARAMS, SZ_STRESS_STRIKE,
                                SZ_STRESS_TAU, SZ_TABLE_PARAMS,
                                SZ_UNCORRELATED_PARAMS)

TAU_TABLE = 1.0 / 12.0


def test_heston_call_reference_rows():
    assert fourier.heston_call_ft(HESTON_TABLE_PARAMS, 1000.0, 1000.0,
                                  TAU_TABLE) == pytest.approx(82.4766, abs=1e-3)
    assert fourier.heston_call_ft(HESTON_TABLE_PARAMS, 950.0, 1000.0,
                                  TAU_TABLE) == pytest.approx(57.8425, abs=1e-3)


def test_heston_call_degenerates_to_black_scholes():
    params = ModelParams(kappa=2.0, theta=0.04, omega=0.0, rho=-0.5, r=0.1,
                         v0=0.04)
    ft = fourier.heston_call_ft(params, 100.0, 100.0, 1.0)
    bs = closedform.bs_call(100.0, 100.0, 0.1, 0.2, 1.0).price
    assert abs(ft - bs) / bs < 1e-6


def test_heston_put_parity_and_bounds():
    params = HESTON_CONVERGENCE_PARAMS
    call = fourier.heston_call_ft(params, 100.0, 100.0, 1.0)
    put = fourier.heston_put_ft(params, 100.0, 100.0, 1.0)
    assert put == pytest.approx(call - 100.0 + 100.0 * math.exp(-0.1), abs=1e-8)
    deep = fourier.heston_put_ft(params, 50.0, 100.0, 1.0)
    assert deep >= 100.0 * math.exp(-0.1) - 50.0 - 1e-6


def test_heston_greeks_reference_values():
    delta, gamma, vega = fourier.heston_greeks_ft(HESTON_TABLE_PARAMS, 1000.0,
                                                  1000.0, TAU_TABLE)
    assert delta * 100.0 == pytest.approx(54.18, abs=0.005)
    assert gamma * 100.0 == pytest.approx(0.19246, abs=0.0005)
    assert vega == pytest.approx(79.3178, abs=0.01)


def test_heston_delta_saturates_deep_in_the_money():
    delta, _, _ = fourier.heston_greeks_ft(HESTON_TABLE_PARAMS, 1e6, 1000.0,
                                           TAU_TABLE)
    assert delta == pytest.approx(1.0, abs=1e-6)


def test_heston_greeks_match_bump_and_reprice():
    params = HESTON_TABLE_PARAMS
    delta, gamma, vega = fourier.heston_greeks_ft(params, 1000.0, 1000.0,
                                                  TAU_TABLE)
    h = 0.05
    up = fourier.heston_call_ft(params, 1000.0 + h, 1000.0, TAU_TABLE)
    dn = fourier.heston_call_ft(params, 1000.0 - h, 1000.0, TAU_TABLE)
    mid = fourier.heston_call_ft(params, 1000.0, 1000.0, TAU_TABLE)
    assert (up - dn) / (2.0 * h) == pytest.approx(delta, rel=1e-5)
    assert (up - 2.0 * mid + dn) / (h * h) == pytest.approx(gamma, rel=1e-5)
    hv = 1e-4
    upv = fourier.heston_call_ft(dataclasses.replace(params, v0=params.v0 + hv),
                                 1000.0, 1000.0, TAU_TABLE)
    dnv = fourier.heston_call_ft(dataclasses.replace(params, v0=params.v0 - hv),
                                 1000.0, 1000.0, TAU_TABLE)
    assert (upv - dnv) / (2.0 * hv) == pytest.approx(vega, rel=1e-5)


def test_corrected_log_first_call_uses_principal_branch():
    value, tracker = corrected_log(complex(-1.0, 0.001), BranchTracker())
    assert tracker.k == 0
    assert value.imag == pytest.approx(math.pi - 0.001, abs=1e-6)
    assert value.real == pytest.approx(0.0, abs=1e-6)


def test_corrected_log_counts_a_full_rotation():
    tracker = BranchTracker()
    path = [complex(1.0, 0.0), complex(0.0, 1.0), complex(-1.0, 0.001),
            complex(0.0, -1.0), complex(1.0, 0.0)]
    for z in path:
        value, tracker = corrected_log(z, tracker)
    assert tracker.k == 1
    assert value.imag == pytest.approx(2.0 * math.pi, abs=1e-12)


def test_corrected_log_inverts_exp_for_any_wind():
    rng = random.Random(21)
    tracker = BranchTracker()
    for _ in range(200):
        z = complex(rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0))
        if abs(z) < 1e-6:
            continue
        value, tracker = corrected_log(z, tracker)
        back = cmath.exp(value)
        assert abs(back - z) <= 1e-12 * abs(z)


def test_corrected_log_rejects_zero():
    with pytest.raises(ZeroDivisionError):
        corrected_log(0j, BranchTracker())


def test_sz_call_reference_value():
    price = fourier.sz_call_ft(SZ_TABLE_PARAMS, 100.0, 100.0, 0.25)
    assert price == pytest.approx(5.277441496037838, abs=1e-6)


def test_sz_bump_delta_sits_next_to_the_series_delta():
    # direct bump of the pricer; the golden-table delta column for this
    # row disagrees with both the bump and the simulation evidence, so
    # table comparisons run through the instability rule in experiments
    h = 0.25
    up = fourier.sz_call_ft(SZ_TABLE_PARAMS, 100.0 + h, 100.0, 0.25)
    dn = fourier.sz_call_ft(SZ_TABLE_PARAMS, 100.0 - h, 100.0, 0.25)
    assert (up - dn) / (2.0 * h) * 100.0 == pytest.approx(63.0363, abs=0.01)


def test_sz_degenerates_to_black_scholes():
    degen = ModelParams(kappa=4.0, theta=0.2, omega=1e-3, rho=0.0, r=0.0953,
                        sigma0=0.2)
    ft = fourier.sz_call_ft(degen, 100.0, 100.0, 0.25)
    bs = closedform.bs_call(100.0, 100.0, 0.0953, 0.2, 0.25).price
    assert abs(ft - bs) < 1e-4


def test_sz_correlation_moves_the_price_within_mc_bands():
    p_corr = fourier.sz_call_ft(SZ_TABLE_PARAMS, 100.0, 100.0, 0.25)
    p_zero = fourier.sz_call_ft(SZ_UNCORRELATED_PARAMS, 100.0, 100.0, 0.25)
    assert abs(p_corr - p_zero) > 1e-3
    for params, ft in ((SZ_TABLE_PARAMS, p_corr), (SZ_UNCORRELATED_PARAMS, p_zero)):
        res = mc.simulate_sz_call(params, 100.0, 100.0, 0.25)
        assert res.ci_low <= ft <= res.ci_high


def _log_imag_sweep(params, tau, n=2000):
    tracker = BranchTracker()
    imags = []
    for phi in np.linspace(1e-7, 200.0, n):
        ev = fourier.sz_characteristic_function(1j * phi, params, 100.0, tau,
                                                tracker)
        imags.append(ev.log_term.imag)
    return imags, tracker


def test_sz_branch_sweep_is_continuous_at_table_params():
    imags, tracker = _log_imag_sweep(SZ_TABLE_PARAMS, 0.25)
    jumps = [abs(b - a) for a, b in zip(imags, imags[1:])]
    assert max(jumps) < math.pi
    assert tracker.k == 0


def test_sz_branch_sweep_winds_at_the_stress_set():
    imags, tracker = _log_imag_sweep(SZ_STRESS_PARAMS, SZ_STRESS_TAU)
    jumps = [abs(b - a) for a, b in zip(imags, imags[1:])]
    assert max(jumps) < math.pi
    assert tracker.k >= 1


def test_sz_stress_price_depends_on_branch_correction():
    corrected = fourier.sz_call_ft(SZ_STRESS_PARAMS, 100.0, SZ_STRESS_STRIKE,
                                   SZ_STRESS_TAU)
    assert corrected == pytest.approx(24.402260856626846, abs=1e-6)
    with pytest.raises(QuadratureError) as info:
        fourier.sz_call_ft(SZ_STRESS_PARAMS, 100.0, SZ_STRESS_STRIKE,
                           SZ_STRESS_TAU, branch_correction=False)
    assert abs(info.value.estimate - corrected) > 1.0


def test_integrate_semi_infinite_known_integrals():
    value, err = integrate_semi_infinite(lambda phi: math.exp(-phi))
    assert value == pytest.approx(1.0, abs=1e-10)
    assert abs(value - 1.0) <= max(err, 1e-12)
    value, err = integrate_semi_infinite(lambda phi: math.exp(-0.5 * phi * phi))
    root = math.sqrt(0.5 * math.pi)
    assert value == pytest.approx(root, abs=1e-10)
    assert abs(value - root) <= max(err, 1e-12)


def test_integrate_semi_infinite_reports_non_convergence():
    spec = QuadratureSpec(abs_tol=1e-300, rel_tol=1e-300, max_splits=4)
    with pytest.raises(QuadratureError) as info:
        integrate_semi_infinite(lambda phi: math.exp(-phi), spec)
    assert math.isfinite(info.value.estimate)
    assert info.value.estimate == pytest.approx(1.0, abs=1e-6)


def test_quadrature_spec_validation():
    with pytest.raises(ValueError):
        QuadratureSpec(abs_tol=0.0)
    with pytest.raises(ValueError):
        QuadratureSpec(rel_tol=-1.0)


def test_heston_probability_integrand_consistency():
    # P2 - 1/2 recovered by integrating the plain-CF integrand directly
    params = HESTON_TABLE_PARAMS
    spot, strike, tau = 1000.0, 1000.0, TAU_TABLE
    lnk = math.log(strike)

    def integrand(phi):
        cf = fourier.heston_characteristic_function(phi, params, spot, tau)
        return (cmath.exp(-1j * phi * lnk) * cf / (1j * phi)).real

    value, _ = integrate_semi_infinite(integrand)
    p2 = 0.5 + value / math.pi
    call = fourier.heston_call_ft(params, spot, strike, tau)
    delta, _, _ = fourier.heston_greeks_ft(params, spot, strike, tau)
    # C = S*P1 - K*exp(-r tau)*P2 with P1 = delta
    reconstructed = spot * delta - strike * math.exp(-params.r * tau) * p2
    assert reconstructed == pytest.approx(call, abs=1e-6)
