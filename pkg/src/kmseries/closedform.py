"""Closed-form baseline pricers.

Black-Scholes call/put and the one-factor mean-reverting futures price,
each in two flavors: fast numeric functions built on scipy, and symbolic
expressions over the engine's variables.  The symbolic forms are what the
series expansion differentiates, so they keep the volatility and the
horizon as named variables by default; strike and rate are folded in as
constants.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from . import symx


@dataclass(frozen=True)
class BsQuote:
    """Black-Scholes price plus the pieces reused by the greek series."""

    price: float
    d1: float
    d2: float
    delta: float
    gamma: float


@dataclass(frozen=True)
class SchwartzQuote:
    """Futures price with the mean/variance of the terminal log price."""

    price: float
    mean: float
    variance: float


def _check_positive(**kwargs):
    for name, value in kwargs.items():
        if not np.all(np.asarray(value) > 0.0):
            raise ValueError("%s must be positive, got %r" % (name, value))


def bs_call(spot, strike, rate, vol, tau):
    """Price a European call under Black-Scholes.

    Accepts scalars or numpy arrays.  Returns a BsQuote whose delta and
    gamma are the analytic forms, used as the baseline term of the
    approximated greeks.
    """
    _check_positive(spot=spot, strike=strike, vol=vol, tau=tau)
    spot = np.asarray(spot, dtype=float)
    srt = vol * np.sqrt(tau)
    d1 = (np.log(spot / strike) + (rate + 0.5 * vol * vol) * tau) / srt
    d2 = d1 - srt
    disc = math.exp(-rate * tau)
    price = spot * ndtr(d1) - strike * disc * ndtr(d2)
    delta = ndtr(d1)
    gamma = np.exp(-0.5 * d1 * d1) / (spot * srt * math.sqrt(2.0 * math.pi))
    if price.ndim == 0:
        return BsQuote(float(price), float(d1), float(d2), float(delta), float(gamma))
    return BsQuote(price, d1, d2, delta, gamma)


def bs_put(spot, strike, rate, vol, tau):
    """European put through the same d1/d2 as the call."""
    _check_positive(spot=spot, strike=strike, vol=vol, tau=tau)
    spot = np.asarray(spot, dtype=float)
    srt = vol * np.sqrt(tau)
    d1 = (np.log(spot / strike) + (rate + 0.5 * vol * vol) * tau) / srt
    d2 = d1 - srt
    disc = math.exp(-rate * tau)
    price = strike * disc * ndtr(-d2) - spot * ndtr(-d1)
    delta = ndtr(d1) - 1.0
    gamma = np.exp(-0.5 * d1 * d1) / (spot * srt * math.sqrt(2.0 * math.pi))
    if price.ndim == 0:
        return BsQuote(float(price), float(d1), float(d2), float(delta), float(gamma))
    return BsQuote(price, d1, d2, delta, gamma)


def _bs_d1_d2(strike, rate, spot, vol, time, horizon):
    tau = symx.subtract(horizon, time)
    srt = symx.multiply(vol, symx.sqrt(tau))
    d1 = symx.divide(
        symx.add(
            symx.ln(symx.divide(spot, strike)),
            symx.multiply(
                symx.add(rate, symx.multiply(symx.const(0.5), symx.power(vol, symx.const(2.0)))),
                tau,
            ),
        ),
        srt,
    )
    d2 = symx.subtract(d1, srt)
    return d1, d2, tau


def bs_call_symbolic(strike, rate, spot="S", vol="eta0", time="t", horizon="T"):
    """Black-Scholes call as an expression over (spot, time).

    `strike` and `rate` are plain numbers folded into the tree as
    constants.  The volatility and the horizon stay symbolic (variables
    named by `vol` and `horizon`) so a single expression serves every
    binding of the nuisance volatility and every maturity.
    """
    strike_e = symx.const(float(strike))
    rate_e = symx.const(float(rate))
    spot_e = symx.var(spot)
    vol_e = symx.var(vol)
    d1, d2, tau = _bs_d1_d2(strike_e, rate_e, spot_e, vol_e, symx.var(time), symx.var(horizon))
    disc = symx.exp(symx.multiply(symx.negate(rate_e), tau))
    return symx.subtract(
        symx.multiply(spot_e, symx.normal_cdf(d1)),
        symx.multiply(symx.multiply(strike_e, disc), symx.normal_cdf(d2)),
    )


def bs_put_symbolic(strike, rate, spot="S", vol="eta0", time="t", horizon="T"):
    """Black-Scholes put over the same variables as bs_call_symbolic."""
    strike_e = symx.const(float(strike))
    rate_e = symx.const(float(rate))
    spot_e = symx.var(spot)
    vol_e = symx.var(vol)
    d1, d2, tau = _bs_d1_d2(strike_e, rate_e, spot_e, vol_e, symx.var(time), symx.var(horizon))
    disc = symx.exp(symx.multiply(symx.negate(rate_e), tau))
    return symx.subtract(
        symx.multiply(symx.multiply(strike_e, disc), symx.normal_cdf(symx.negate(d2))),
        symx.multiply(spot_e, symx.normal_cdf(symx.negate(d1))),
    )


def schwartz_futures(x, alpha, kappa, sigma0, horizon):
    """Futures price when the log spot follows a mean-reverting Gaussian.

    The terminal log price is normal with mean
    e^{-kappa T} x + (1 - e^{-kappa T}) alpha and variance
    sigma0^2 (1 - e^{-2 kappa T}) / (2 kappa); the futures price is the
    mean of its exponential.
    """
    if kappa <= 0.0:
        raise ValueError("kappa must be positive, got %r" % (kappa,))
    if sigma0 < 0.0:
        raise ValueError("sigma0 must be nonnegative, got %r" % (sigma0,))
    if horizon <= 0.0:
        raise ValueError("horizon must be positive, got %r" % (horizon,))
    decay = math.exp(-kappa * horizon)
    mean = decay * x + (1.0 - decay) * alpha
    variance = sigma0 * sigma0 * (1.0 - decay * decay) / (2.0 * kappa)
    return SchwartzQuote(math.exp(mean + 0.5 * variance), mean, variance)


def schwartz_futures_symbolic(alpha, kappa, spot="X", vol="sigma0", time="t", horizon="T"):
    """Symbolic futures price over (spot, time) with symbolic volatility.

    alpha and kappa fold in as constants; the volatility stays a named
    variable so the nuisance can be rebound, mirroring bs_call_symbolic.
    """
    alpha_e = symx.const(float(alpha))
    kappa_e = symx.const(float(kappa))
    x_e = symx.var(spot)
    vol_e = symx.var(vol)
    tau = symx.subtract(symx.var(horizon), symx.var(time))
    decay = symx.exp(symx.multiply(symx.negate(kappa_e), tau))
    mean = symx.add(
        symx.multiply(decay, x_e),
        symx.multiply(symx.subtract(symx.ONE, decay), alpha_e),
    )
    variance = symx.divide(
        symx.multiply(
            symx.power(vol_e, symx.const(2.0)),
            symx.subtract(symx.ONE, symx.power(decay, symx.const(2.0))),
        ),
        symx.multiply(symx.const(2.0), kappa_e),
    )
    return symx.exp(symx.add(mean, symx.multiply(symx.const(0.5), variance)))
