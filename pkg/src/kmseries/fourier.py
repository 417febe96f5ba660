"""Reference pricers built on characteristic functions.

The square-root variance model uses a characteristic function written so
the complex logarithm's argument never crosses the negative real axis,
which makes plain principal-branch evaluation safe.  The
Ornstein-Uhlenbeck volatility model has no such reformulation available,
so its pricer tracks the winding of the log argument along a monotone
frequency grid and adds the appropriate multiple of 2*pi*i.

Integration over [0, infinity) uses an in-house adaptive Gauss-Kronrod
scheme with a tail-tested truncation point.
"""

import cmath
import heapq
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.integrate import trapezoid


class QuadratureError(RuntimeError):
    """Adaptive refinement hit its depth bound before the tolerance."""

    def __init__(self, message, estimate, error_estimate):
        super().__init__(message)
        self.estimate = estimate
        self.error_estimate = error_estimate


@dataclass(frozen=True)
class QuadratureSpec:
    """Controls for the semi-infinite adaptive quadrature."""

    abs_tol: float = 1e-10
    rel_tol: float = 1e-9
    initial_upper: float = 200.0
    max_doublings: int = 3
    initial_panels: int = 16
    max_splits: int = 4000

    def __post_init__(self):
        if self.abs_tol <= 0.0 or self.rel_tol <= 0.0:
            raise ValueError("tolerances must be positive")


@dataclass
class BranchTracker:
    """Rotation count for a corrected complex logarithm.

    Holds the previous principal argument; whenever the argument jumps by
    more than pi between consecutive (monotone-in-frequency) evaluations,
    the wind count k is bumped so the corrected log stays continuous.
    """

    k: int = 0
    last_arg: Optional[float] = None


@dataclass(frozen=True)
class CfEvaluation:
    """Characteristic-function value plus branch-tracking state.

    log_term is the (possibly corrected) logarithm that entered the
    evaluation; k and last_arg echo the tracker after the call.
    """

    value: complex
    k: int = 0
    last_arg: Optional[float] = None
    log_term: complex = 0j


def corrected_log(z, tracker):
    """Branch-corrected complex logarithm.

    Returns log|z| + i*(Arg(z) + 2*k*pi) and the updated tracker.  The
    caller must feed z values along a monotone parameter sweep, otherwise
    jump detection is meaningless.
    """
    if z == 0:
        raise ZeroDivisionError("complex logarithm of zero")
    arg = cmath.phase(z)
    if tracker.last_arg is not None:
        jump = arg - tracker.last_arg
        if jump < -math.pi:
            tracker.k += 1
        elif jump > math.pi:
            tracker.k -= 1
    tracker.last_arg = arg
    return complex(math.log(abs(z)), arg + 2.0 * math.pi * tracker.k), tracker


# 15-point Kronrod nodes on [-1, 1] (nonnegative half) with Kronrod weights,
# and the embedded 7-point Gauss weights on the odd-indexed nodes.
_XK = (0.991455371120813, 0.949107912342759, 0.864864423359769,
       0.741531185599394, 0.586087235467691, 0.405845151377397,
       0.207784955007898, 0.0)
_WK = (0.022935322010529, 0.063092092629979, 0.104790010322250,
       0.140653259715525, 0.169004726639267, 0.190350578064785,
       0.204432940075298, 0.209482141084728)
_WG = (0.129484966168870, 0.279705391489277, 0.381830050505119,
       0.417959183673469)


def _gk15(f, a, b):
    center = 0.5 * (a + b)
    half = 0.5 * (b - a)
    vc = f(center)
    acc_k = _WK[7] * vc
    acc_g = _WG[3] * vc
    for i in range(7):
        x = _XK[i]
        v = f(center - half * x) + f(center + half * x)
        acc_k += _WK[i] * v
        if i % 2 == 1:
            acc_g += _WG[i // 2] * v
    return acc_k * half, abs(acc_k - acc_g) * half


def integrate_semi_infinite(f, spec=None):
    """Integrate f over [0, infinity), returning (value, error estimate).

    The domain is truncated at U, starting from the configured bound and
    doubling while the tail test |f(U)|*U < abs_tol/10 fails; panels are
    then split adaptively, worst error first, until the summed error
    estimate meets the tolerance.
    """
    spec = spec or QuadratureSpec()
    upper = spec.initial_upper
    for _ in range(spec.max_doublings):
        if abs(f(upper)) * upper < spec.abs_tol / 10.0:
            break
        upper *= 2.0
    edges = np.linspace(0.0, upper, spec.initial_panels + 1)
    heap = []
    total = 0.0
    total_err = 0.0
    serial = 0
    for a, b in zip(edges[:-1], edges[1:]):
        v, e = _gk15(f, a, b)
        total += v
        total_err += e
        heapq.heappush(heap, (-e, serial, a, b, v, e))
        serial += 1
    splits = 0
    while total_err > max(spec.abs_tol, spec.rel_tol * abs(total)):
        if splits >= spec.max_splits:
            raise QuadratureError(
                "quadrature did not converge: estimate %.12g, error estimate %.3g"
                % (total, total_err), total, total_err)
        _, _, a, b, v, e = heapq.heappop(heap)
        mid = 0.5 * (a + b)
        v1, e1 = _gk15(f, a, mid)
        v2, e2 = _gk15(f, mid, b)
        total += v1 + v2 - v
        total_err += e1 + e2 - e
        heapq.heappush(heap, (-e1, serial, a, mid, v1, e1))
        serial += 1
        heapq.heappush(heap, (-e2, serial, mid, b, v2, e2))
        serial += 1
        splits += 1
    return float(total), float(total_err)


def _deterministic_variance(kappa, theta, v0, tau):
    """Integrated variance of the omega = 0 mean-reverting path."""
    if kappa == 0.0:
        return v0 * tau
    return theta * tau + (v0 - theta) * (1.0 - math.exp(-kappa * tau)) / kappa


def heston_characteristic_function(u, params, spot, tau):
    """CF of the terminal log spot under square-root variance.

    Written in the form whose log argument stays clear of the negative
    real axis for admissible parameters, so no branch tracking is needed.
    """
    kappa, theta, omega, rho = params.kappa, params.theta, params.omega, params.rho
    r, v0 = params.r, params.v0
    iu = 1j * u
    if omega == 0.0:
        # deterministic variance path; terminal log spot is Gaussian with
        # variance equal to the integrated variance
        w = _deterministic_variance(kappa, theta, v0, tau)
        return cmath.exp(iu * (math.log(spot) + r * tau) - 0.5 * (iu + u * u) * w)
    beta = kappa - rho * omega * iu
    d = cmath.sqrt(beta * beta + omega * omega * (iu + u * u))
    g = (beta - d) / (beta + d)
    edt = cmath.exp(-d * tau)
    log_term = cmath.log((1.0 - g * edt) / (1.0 - g))
    big_c = theta * kappa / (omega * omega) * ((beta - d) * tau - 2.0 * log_term)
    big_d = (beta - d) * (1.0 - edt) / (omega * omega * (1.0 - g * edt))
    return cmath.exp(iu * (math.log(spot) + r * tau) + big_c + big_d * v0)


def _heston_v_slope(u, params, tau):
    """d log CF / d v0; vanishes at u = -i."""
    kappa, omega, rho = params.kappa, params.omega, params.rho
    iu = 1j * u
    if omega == 0.0:
        dw = tau if kappa == 0.0 else (1.0 - math.exp(-kappa * tau)) / kappa
        return -0.5 * (iu + u * u) * dw
    beta = kappa - rho * omega * iu
    d = cmath.sqrt(beta * beta + omega * omega * (iu + u * u))
    g = (beta - d) / (beta + d)
    edt = cmath.exp(-d * tau)
    return (beta - d) * (1.0 - edt) / (omega * omega * (1.0 - g * edt))


def _heston_probabilities(params, spot, strike, tau, spec):
    lnk = math.log(strike)
    denom = spot * math.exp(params.r * tau)

    def integrand_p1(phi):
        cf = heston_characteristic_function(phi - 1j, params, spot, tau)
        return (cmath.exp(-1j * phi * lnk) * cf / (1j * phi * denom)).real

    def integrand_p2(phi):
        cf = heston_characteristic_function(phi, params, spot, tau)
        return (cmath.exp(-1j * phi * lnk) * cf / (1j * phi)).real

    i1, _ = integrate_semi_infinite(integrand_p1, spec)
    i2, _ = integrate_semi_infinite(integrand_p2, spec)
    return i1 / math.pi, i2 / math.pi


def heston_call_ft(params, spot, strike, tau, spec=None):
    """Reference call price via the probability decomposition."""
    spec = spec or QuadratureSpec()
    i1, i2 = _heston_probabilities(params, spot, strike, tau, spec)
    p1 = 0.5 + i1
    p2 = 0.5 + i2
    return spot * p1 - strike * math.exp(-params.r * tau) * p2


def heston_put_ft(params, spot, strike, tau, spec=None):
    """Reference put price with the sign-flipped probabilities."""
    spec = spec or QuadratureSpec()
    i1, i2 = _heston_probabilities(params, spot, strike, tau, spec)
    p1 = 0.5 - i1
    p2 = 0.5 - i2
    return strike * math.exp(-params.r * tau) * p2 - spot * p1


def heston_greeks_ft(params, spot, strike, tau, spec=None):
    """Analytic (delta, gamma, vega) by differentiating under the integral.

    delta = P1; gamma is the S-derivative of P1; vega differentiates both
    probabilities with respect to the spot variance.
    """
    spec = spec or QuadratureSpec()
    lnk = math.log(strike)
    denom = spot * math.exp(params.r * tau)

    def integrand_p1(phi):
        cf = heston_characteristic_function(phi - 1j, params, spot, tau)
        return (cmath.exp(-1j * phi * lnk) * cf / (1j * phi * denom)).real

    def integrand_gamma(phi):
        cf = heston_characteristic_function(phi - 1j, params, spot, tau)
        return (cmath.exp(-1j * phi * lnk) * cf / (spot * denom)).real

    def integrand_v1(phi):
        u = phi - 1j
        cf = heston_characteristic_function(u, params, spot, tau)
        return (cmath.exp(-1j * phi * lnk) * _heston_v_slope(u, params, tau)
                * cf / (1j * phi * denom)).real

    def integrand_v2(phi):
        cf = heston_characteristic_function(phi, params, spot, tau)
        return (cmath.exp(-1j * phi * lnk) * _heston_v_slope(phi, params, tau)
                * cf / (1j * phi)).real

    i1, _ = integrate_semi_infinite(integrand_p1, spec)
    delta = 0.5 + i1 / math.pi
    gamma, _ = integrate_semi_infinite(integrand_gamma, spec)
    gamma /= math.pi
    dv1, _ = integrate_semi_infinite(integrand_v1, spec)
    dv2, _ = integrate_semi_infinite(integrand_v2, spec)
    vega = spot * dv1 / math.pi - strike * math.exp(-params.r * tau) * dv2 / math.pi
    return delta, gamma, vega


def sz_characteristic_function(c, params, spot, tau, tracker=None,
                               branch_correction=True):
    """E[exp(c * ln S_T)] under Ornstein-Uhlenbeck volatility.

    c is a complex exponent (i*phi for the plain CF, 1+i*phi for the
    share-measure one).  The single branch-sensitive term is the
    logarithm of the hyperbolic combination; passing a tracker keeps it
    continuous along a monotone sweep in phi.
    """
    kappa, theta, omega, rho = params.kappa, params.theta, params.omega, params.rho
    r, sigma0 = params.r, params.sigma0
    x = math.log(spot)
    w2 = omega * omega
    s1 = 0.5 * c * c * (1.0 - rho * rho) - 0.5 * c + c * rho * kappa / omega
    s2 = -c * rho * kappa * theta / omega
    s3 = c * rho / (2.0 * omega)
    g1 = cmath.sqrt(kappa * kappa - 2.0 * w2 * s1)
    g2 = (kappa - 2.0 * w2 * s3) / g1
    g3 = kappa * kappa * theta + s2 * w2
    sh = cmath.sinh(g1 * tau)
    ch = cmath.cosh(g1 * tau)
    psi = sh + g2 * ch
    phic = ch + g2 * sh
    if branch_correction:
        tracker = tracker or BranchTracker()
        log_phic, tracker = corrected_log(phic, tracker)
        k, last_arg = tracker.k, tracker.last_arg
    else:
        log_phic = cmath.log(phic)
        k, last_arg = 0, cmath.phase(phic)
    ktg3 = kappa * theta * g1 - g2 * g3
    big_d = (kappa - g1 * psi / phic) / w2
    big_b = ((ktg3 + g3 * psi) / phic - kappa * theta * g1) / (w2 * g1)
    big_c = (-0.5 * log_phic + 0.5 * kappa * tau
             + ((kappa * theta * g1) ** 2 - g3 * g3) / (2.0 * w2 * g1 ** 3)
             * (sh / phic - g1 * tau)
             + ktg3 * g3 / (w2 * g1 ** 3) * ((ch - 1.0) / phic))
    value = cmath.exp(c * (x + r * tau)
                      - s3 * (sigma0 * sigma0 + w2 * tau)
                      + 0.5 * big_d * sigma0 * sigma0 + big_b * sigma0 + big_c)
    return CfEvaluation(value, k, last_arg, log_phic)


def _sz_probability(params, spot, strike, tau, shift, upper, tol,
                    branch_correction, lo=1e-7, start=512, max_doubles=8):
    """P_j - 1/2 for the OU-volatility pricer, by refined trapezoid sums.

    shift=1 uses the share-measure exponent 1+i*phi (P1), shift=0 the
    plain i*phi (P2).  Each refinement level re-sweeps the whole grid in
    increasing phi with a fresh tracker, which keeps branch tracking
    well-defined.
    """
    lnk = math.log(strike)
    scale = spot * math.exp(params.r * tau) if shift else 1.0

    def sweep(n):
        grid = np.linspace(lo, upper, n + 1)
        tracker = BranchTracker()
        vals = np.empty(n + 1)
        for idx, phi in enumerate(grid):
            c = (shift + 1j * phi) if shift else 1j * phi
            cf = sz_characteristic_function(c, params, spot, tau, tracker,
                                            branch_correction)
            vals[idx] = (cmath.exp(-1j * phi * lnk) * cf.value
                         / (1j * phi * scale)).real
        return float(trapezoid(vals, grid))

    n = start
    prev = sweep(n)
    for _ in range(max_doubles):
        n *= 2
        cur = sweep(n)
        if abs(cur - prev) < tol:
            return cur / math.pi
        prev = cur
    raise QuadratureError(
        "trapezoid refinement did not converge below %g" % tol, prev / math.pi, tol)


def sz_call_ft(params, spot, strike, tau, upper=200.0, tol=1e-8,
               branch_correction=True):
    """Call price under Ornstein-Uhlenbeck volatility via two CFs.

    Setting rho = 0 reproduces the symmetric (Stein-Stein) special case.
    branch_correction=False evaluates the raw principal-branch logarithm
    and exists only as a regression guard for the winding correction.
    """
    p1 = 0.5 + _sz_probability(params, spot, strike, tau, 1, upper, tol,
                               branch_correction)
    p2 = 0.5 + _sz_probability(params, spot, strike, tau, 0, upper, tol,
                               branch_correction)
    return spot * p1 - strike * math.exp(-params.r * tau) * p2
