"""Model catalog tests: drift and covariance entries against hand
formulas, baseline padding, and parameter validation."""

import math

import pytest

from kmseries import models, symx
from kmseries.models import ModelParams


HESTON = ModelParams(kappa=2.0, theta=0.04, omega=0.1, rho=-0.5, r=0.1)
POINT = {"S": 90.0, "v": 0.36, "sigma": 0.42, "X": math.log(80.0)}


def _at(e, binding=POINT):
    return symx.evaluate(e, binding)


def test_heston_drift_and_covariance():
    m = models.heston(HESTON)
    assert m.state == ("S", "v")
    assert _at(m.drift[0]) == pytest.approx(0.1 * 90.0)
    assert _at(m.drift[1]) == pytest.approx(2.0 * (0.04 - 0.36))
    cov = models.covariance(m)
    assert _at(cov[0][0]) == pytest.approx(0.36 * 90.0 ** 2, rel=1e-14)
    assert _at(cov[1][1]) == pytest.approx(0.1 ** 2 * 0.36, rel=1e-14)
    assert _at(cov[0][1]) == pytest.approx(-0.5 * 0.1 * 0.36 * 90.0, rel=1e-14)
    assert cov[0][1] is cov[1][0]


def test_cev_covariance_frees_the_variance_exponent():
    params = ModelParams(kappa=2.0, theta=0.04, omega=0.1, rho=-0.5, r=0.1,
                         gamma=1.33)
    cov = models.covariance(models.cev(params))
    v, s = POINT["v"], POINT["S"]
    assert _at(cov[1][1]) == pytest.approx(0.01 * v ** 2.66, rel=1e-14)
    assert _at(cov[0][1]) == pytest.approx(-0.5 * 0.1 * math.sqrt(v) * v ** 1.33 * s,
                                           rel=1e-14)


def test_cev_gamma_half_covariance_matches_heston():
    params = ModelParams(kappa=2.0, theta=0.04, omega=0.1, rho=-0.5, r=0.1,
                         gamma=0.5)
    cov_cev = models.covariance(models.cev(params))
    cov_hest = models.covariance(models.heston(HESTON))
    for i in range(2):
        for j in range(2):
            assert _at(cov_cev[i][j]) == pytest.approx(_at(cov_hest[i][j]), rel=1e-13)


def test_schobel_zhu_covariance():
    params = ModelParams(kappa=4.0, theta=0.2, omega=0.1, rho=-0.5, r=0.0953)
    m = models.schobel_zhu(params)
    assert m.state == ("S", "sigma")
    cov = models.covariance(m)
    s, sig = POINT["S"], POINT["sigma"]
    assert _at(cov[0][0]) == pytest.approx(sig ** 2 * s ** 2, rel=1e-14)
    assert _at(cov[1][1]) == pytest.approx(0.01, rel=1e-14)
    assert _at(cov[0][1]) == pytest.approx(-0.5 * 0.1 * sig * s, rel=1e-14)


def test_commodity_drift_carries_convexity_and_no_discounting():
    params = ModelParams(kappa=1.0, theta=0.05, omega=0.2, rho=-0.5,
                         eta=1.0, alpha=math.log(85.0))
    m = models.lutz_commodity(params)
    x, v = POINT["X"], POINT["v"]
    assert _at(m.drift[0]) == pytest.approx(1.0 * (math.log(85.0) - x) - 0.5 * v,
                                            rel=1e-14)
    assert m.short_rate is symx.ZERO
    cov = models.covariance(m)
    assert _at(cov[0][0]) == pytest.approx(v, rel=1e-14)
    assert _at(cov[0][1]) == pytest.approx(-0.5 * 0.2 * v, rel=1e-14)


def test_black_scholes_keeps_nuisance_symbolic_by_default():
    m = models.black_scholes(ModelParams(r=0.0))
    assert "eta0" in symx.variables(m.diffusion[0][0])
    pinned = models.black_scholes(ModelParams(r=0.0, eta0=0.2))
    assert symx.variables(pinned.diffusion[0][0]) == {"S"}


def test_embed_baseline_pads_missing_state():
    true = models.heston(HESTON)
    base = models.black_scholes(ModelParams(r=HESTON.r))
    emb = models.embed_baseline(true, base)
    assert emb.padding == ("v",)
    assert emb.baseline.state == ("S", "v")
    assert emb.baseline.drift[1] is symx.ZERO
    cov = models.covariance(emb.baseline)
    assert cov[1][1] is symx.ZERO
    assert cov[0][1] is symx.ZERO
    assert _at(cov[0][0], {"S": 90.0, "eta0": 0.6}) == pytest.approx(
        0.36 * 8100.0, rel=1e-14)


def test_embed_baseline_rejects_extra_variables():
    true = models.black_scholes(ModelParams(r=0.0))
    base = models.heston(HESTON)
    with pytest.raises(ValueError, match="not present"):
        models.embed_baseline(true, base)


def test_missing_parameter_raises_by_name():
    with pytest.raises(ValueError, match="kappa"):
        models.heston(ModelParams(theta=0.04, omega=0.1, rho=-0.5, r=0.1))
    with pytest.raises(ValueError, match="gamma"):
        models.cev(ModelParams(kappa=1.0, theta=0.04, omega=0.1, rho=-0.5, r=0.1))


def test_domain_checks():
    with pytest.raises(ValueError, match="omega"):
        models.heston(ModelParams(kappa=2.0, theta=0.04, omega=-0.1, rho=-0.5, r=0.1))
    with pytest.raises(ValueError, match="rho"):
        models.heston(ModelParams(kappa=2.0, theta=0.04, omega=0.1, rho=-1.5, r=0.1))
    with pytest.raises(ValueError, match="gamma"):
        models.cev(ModelParams(kappa=2.0, theta=0.04, omega=0.1, rho=-0.5, r=0.1,
                               gamma=0.0))


def test_correlation_matrix_validation():
    m = models.heston(HESTON)
    with pytest.raises(ValueError, match="symmetric"):
        models.SdeModel("bad", m.state, m.drift, m.diffusion,
                        ((1.0, 0.5), (-0.5, 1.0)), m.short_rate)
    with pytest.raises(ValueError, match="unit diagonal"):
        models.SdeModel("bad", m.state, m.drift, m.diffusion,
                        ((0.9, 0.0), (0.0, 1.0)), m.short_rate)
    with pytest.raises(ValueError, match="drift length"):
        models.SdeModel("bad", m.state, m.drift[:1], m.diffusion,
                        m.correlation, m.short_rate)
