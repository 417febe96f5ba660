"""Model and result diagnostics.

Covers the Feller condition, the CEV scale density with its boundary
attainability evidence, the percent-difference metric used by all the
comparison tables, put-call parity residuals, and a bracketed implied
volatility solver for the Black-Scholes model.
"""

import math
from dataclasses import dataclass

from scipy.integrate import quad
from scipy.optimize import brentq

from . import closedform

__all__ = [
    "AttainabilityReport",
    "feller_check",
    "cev_scale_exponent",
    "cev_scale_density",
    "boundary_attainability",
    "percent_diff",
    "bs_implied_vol",
    "parity_check",
]

# A decade-over-decade growth factor above this counts as divergence
# evidence in the attainability slope tests.
_GROWTH_THRESHOLD = 5.0


@dataclass(frozen=True)
class AttainabilityReport:
    """Divergence evidence for one boundary of the variance process.

    boundary is 0.0 or math.inf; verdict is 'attainable', 'unattainable'
    or 'inconclusive'; evidence holds the integral (or lower-bound)
    estimates behind the verdict, in sweep order.
    """

    boundary: float
    verdict: str
    evidence: tuple


def feller_check(kappa, theta, omega):
    """Whether 2*kappa*theta >= omega^2, with the statistic 2kt/w^2.

    omega = 0 degenerates to a deterministic variance path and is
    reported as trivially satisfied with an infinite statistic.
    """
    if kappa < 0 or theta < 0 or omega < 0:
        raise ValueError("feller_check needs nonnegative parameters")
    if omega == 0.0:
        return True, math.inf
    statistic = 2.0 * kappa * theta / (omega * omega)
    return statistic >= 1.0, statistic


def cev_scale_exponent(kappa, theta, omega, gamma, v):
    """log of the CEV scale density at v.

    The antiderivative of -2*kappa*(theta-u)/(omega^2 u^(2 gamma)) has
    power-law form except at gamma = 1/2 and gamma = 1, where one of
    the powers degenerates to a logarithm.
    """
    if v <= 0.0:
        raise ValueError("scale density needs v > 0, got %r" % (v,))
    if omega <= 0.0:
        raise ValueError("scale density needs omega > 0, got %r" % (omega,))
    c = 2.0 * kappa / (omega * omega)
    if gamma == 0.5:
        return c * v - c * theta * math.log(v)
    if gamma == 1.0:
        return c * theta / v + c * math.log(v)
    return (c * theta / (2.0 * gamma - 1.0) * v ** (1.0 - 2.0 * gamma)
            - 0.5 * c / (gamma - 1.0) * v ** (2.0 - 2.0 * gamma))


def cev_scale_density(kappa, theta, omega, gamma, v):
    """Scale density Theta(v); overflows saturate to math.inf."""
    exponent = cev_scale_exponent(kappa, theta, omega, gamma, v)
    if exponent > 709.0:
        return math.inf
    return math.exp(exponent)


def _upper_evidence(kappa, theta, omega, gamma, anchor=1.0):
    """Integrals of Theta over [anchor, U] for growing U."""
    estimates = []
    for upper in (anchor * 10.0, anchor * 100.0, anchor * 1000.0):
        val, _ = quad(lambda u: cev_scale_density(kappa, theta, omega,
                                                  gamma, u),
                      anchor, upper, limit=200)
        estimates.append(val)
    return tuple(estimates)


def _lower_evidence(kappa, theta, omega, gamma):
    """Log lower bounds for the integral of Theta over (eps, anchor).

    Theta explodes super-polynomially at 0 for gamma > 1, so the
    integral is bounded below by Theta(2 eps) * eps; its log grows
    without bound as eps shrinks decade by decade.
    """
    bounds = []
    for eps in (1e-2, 1e-3, 1e-4):
        bounds.append(cev_scale_exponent(kappa, theta, omega, gamma,
                                         2.0 * eps) + math.log(eps))
    return tuple(bounds)


def boundary_attainability(params, gamma=None):
    """Attainability evidence for the CEV variance boundaries 0 and inf.

    Only the gamma > 1 case carries a supported argument; anything else
    comes back inconclusive.  kappa = 0 degenerates the lower-boundary
    exponent, so that side is inconclusive too.  Verdicts rest on
    decade-over-decade growth beyond a documented factor, not a proof.
    """
    g = params.gamma if gamma is None else gamma
    if g is None or g <= 1.0:
        return (AttainabilityReport(0.0, "inconclusive", ()),
                AttainabilityReport(math.inf, "inconclusive", ()))
    upper = _upper_evidence(params.kappa, params.theta, params.omega, g)
    growing = all(b > _GROWTH_THRESHOLD * a
                  for a, b in zip(upper, upper[1:]))
    upper_report = AttainabilityReport(
        math.inf, "unattainable" if growing else "inconclusive", upper)
    if params.kappa == 0.0:
        return (AttainabilityReport(0.0, "inconclusive", ()), upper_report)
    low = _lower_evidence(params.kappa, params.theta, params.omega, g)
    exploding = all(b > a + math.log(_GROWTH_THRESHOLD)
                    for a, b in zip(low, low[1:]))
    lower_report = AttainabilityReport(
        0.0, "unattainable" if exploding else "inconclusive", low)
    return lower_report, upper_report


def percent_diff(approx, reference):
    """Signed percentage difference (approx - reference)/reference * 100."""
    if reference == 0.0:
        raise ValueError("percent_diff needs a nonzero reference")
    return (approx - reference) / reference * 100.0


def bs_implied_vol(price, spot, strike, rate, tau):
    """Volatility whose Black-Scholes call price matches the given one.

    Brent root search on [1e-6, 5].  Prices at or outside the
    no-arbitrage band raise.
    """
    lower = max(spot - strike * math.exp(-rate * tau), 0.0)
    if not lower < price < spot:
        raise ValueError("price %r is outside the no-arbitrage band "
                         "(%r, %r)" % (price, lower, spot))

    def gap(vol):
        return closedform.bs_call(spot, strike, rate, vol, tau).price - price

    return brentq(gap, 1e-6, 5.0, xtol=1e-10)


def parity_check(call, put, spot, strike, rate, tau):
    """Residual call + K e^{-r tau} - put - S; zero when parity holds."""
    return call + strike * math.exp(-rate * tau) - put - spot
