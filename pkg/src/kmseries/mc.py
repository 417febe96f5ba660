"""Monte Carlo reference engine for the stochastic-volatility models.

Discretizations follow the reference recipes: Milstein steps for the
CEV price and variance, an exact-in-distribution-free Euler step for
the Ornstein-Uhlenbeck volatility, and Euler(log price) + Milstein
(variance) for the commodity model.  Correlation enters through
Z2 = rho*Ran1 + sqrt(1-rho^2)*Ran2.  Negative simulated variance is
reflected (absolute value) by default; an absorbing policy (clamp at
zero) is available for sensitivity runs.  Every estimate ships with a
normal-approximation confidence interval.

Draws come from a single counter-based Philox stream seeded by the
config, one (2, paths) block of standard normals per time step, which
makes results bit-reproducible for a fixed configuration.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

__all__ = [
    "McConfig",
    "McResult",
    "confidence_interval",
    "simulate_cev_call",
    "simulate_sz_call",
    "simulate_commodity_futures",
]


@dataclass(frozen=True)
class McConfig:
    """Simulation shape: grid, path count, seed, scheme and policy."""

    steps: int = 500
    paths: int = 20000
    seed: int = 33
    scheme: str = "milstein"
    boundary: str = "reflective"
    level: float = 0.95

    def __post_init__(self):
        if self.steps < 1:
            raise ValueError("steps must be >= 1, got %d" % self.steps)
        if self.paths < 2:
            raise ValueError("paths must be >= 2, got %d" % self.paths)
        if self.boundary not in ("reflective", "absorbing"):
            raise ValueError("boundary must be 'reflective' or 'absorbing', "
                             "got %r" % (self.boundary,))
        if not 0.0 < self.level < 1.0:
            raise ValueError("confidence level must lie in (0, 1), got %r"
                             % (self.level,))


@dataclass(frozen=True)
class McResult:
    estimate: float
    standard_error: float
    ci_low: float
    ci_high: float
    negative_variance_events: int
    config: McConfig


def confidence_interval(mean, std, paths, level=0.95):
    """Normal-approximation interval mean +- z * std/sqrt(paths)."""
    if paths < 2:
        raise ValueError("paths must be >= 2, got %d" % paths)
    if not 0.0 < level < 1.0:
        raise ValueError("confidence level must lie in (0, 1), got %r"
                         % (level,))
    z = norm.ppf(0.5 * (1.0 + level))
    half = z * std / math.sqrt(paths)
    return float(mean - half), float(mean + half)


def _rng(config):
    return np.random.default_rng(np.random.Philox(config.seed))


def _checked(values, step):
    if not np.isfinite(values).all():
        raise FloatingPointError("non-finite path value at step %d" % step)
    return values


def _positive_part(v, policy, counter):
    """Variance actually used by sqrt/power terms, plus event counting."""
    neg = int(np.count_nonzero(v < 0.0))
    counter[0] += neg
    if policy == "reflective":
        return np.abs(v)
    return np.maximum(v, 0.0)


def _finalize(payoffs, config, neg_events):
    mean = float(payoffs.mean())
    std = float(payoffs.std(ddof=1))
    se = std / math.sqrt(config.paths)
    lo, hi = confidence_interval(mean, std, config.paths, config.level)
    return McResult(mean, se, lo, hi, neg_events, config)


def simulate_cev_call(params, spot, strike, tau, config=None):
    """Discounted CEV call price by Milstein simulation.

    The variance exponent gamma comes from params; gamma = 1/2 is the
    square-root (Heston) special case, used as the cross-oracle against
    the Fourier pricer.
    """
    config = config or McConfig()
    if params.gamma is None or params.gamma <= 0.0:
        raise ValueError("cev simulation needs gamma > 0, got %r"
                         % (params.gamma,))
    rng = _rng(config)
    dt = tau / config.steps
    sqdt = math.sqrt(dt)
    rho = params.rho
    rbar = math.sqrt(1.0 - rho * rho)
    g = params.gamma
    neg = [0]

    s = np.full(config.paths, float(spot))
    v = np.full(config.paths, float(params.v0 if params.v0 is not None
                                    else params.theta))
    for step in range(config.steps):
        z = rng.standard_normal((2, config.paths))
        z1 = z[0]
        z2 = rho * z[0] + rbar * z[1]
        vp = _positive_part(v, config.boundary, neg)
        s = s * (1.0 + params.r * dt + np.sqrt(vp) * sqdt * z1
                 + 0.5 * vp * (z1 * z1 - 1.0) * dt)
        v = (v + params.kappa * (params.theta - vp) * dt
             + params.omega * vp ** g * sqdt * z2
             + 0.5 * params.omega ** 2 * g * vp ** (2.0 * g - 1.0)
             * (z2 * z2 - 1.0) * dt)
        _checked(s, step)
        _checked(v, step)
    pay = np.maximum(s - strike, 0.0) * math.exp(-params.r * tau)
    return _finalize(pay, config, neg[0])


def simulate_sz_call(params, spot, strike, tau, config=None):
    """Discounted call under Ornstein-Uhlenbeck volatility.

    The volatility state may go negative; the model permits it, so no
    boundary policy applies (the event counter stays zero).  Euler for
    the volatility, Milstein for the price.
    """
    config = config or McConfig()
    rng = _rng(config)
    dt = tau / config.steps
    sqdt = math.sqrt(dt)
    rho = params.rho
    rbar = math.sqrt(1.0 - rho * rho)

    s = np.full(config.paths, float(spot))
    sig = np.full(config.paths, float(params.sigma0))
    for step in range(config.steps):
        z = rng.standard_normal((2, config.paths))
        z1 = z[0]
        z2 = rho * z[0] + rbar * z[1]
        s = s * (1.0 + params.r * dt + sig * sqdt * z1
                 + 0.5 * sig * sig * (z1 * z1 - 1.0) * dt)
        sig = sig + params.kappa * (params.theta - sig) * dt \
            + params.omega * sqdt * z2
        _checked(s, step)
        _checked(sig, step)
    pay = np.maximum(s - strike, 0.0) * math.exp(-params.r * tau)
    return _finalize(pay, config, 0)


def simulate_commodity_futures(params, x0, tau, config=None):
    """Undiscounted futures value E[exp(X_T)] for the commodity model.

    Euler for the log spot X (drift eta*(alpha - X) - v/2), Milstein for
    the square-root variance.
    """
    config = config or McConfig(steps=1000, paths=200000)
    rng = _rng(config)
    dt = tau / config.steps
    rho = params.rho
    rbar = math.sqrt(1.0 - rho * rho)
    neg = [0]

    x = np.full(config.paths, float(x0))
    v = np.full(config.paths, float(params.v0))
    for step in range(config.steps):
        z = rng.standard_normal((2, config.paths))
        z1 = z[0]
        z2 = rho * z[0] + rbar * z[1]
        vp = _positive_part(v, config.boundary, neg)
        x = x + (params.eta * (params.alpha - x) - 0.5 * vp) * dt \
            + np.sqrt(vp * dt) * z1
        v = vp + params.kappa * (params.theta - vp) * dt \
            + params.omega * np.sqrt(vp * dt) * z2 \
            + 0.25 * params.omega ** 2 * (z2 * z2 - 1.0) * dt
        _checked(x, step)
        _checked(v, step)
    return _finalize(np.exp(x), config, neg[0])
