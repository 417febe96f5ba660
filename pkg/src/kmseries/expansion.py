"""Series-expansion pricing engine.

A pricing approximation is built from a true model, a simpler baseline
with a known closed-form price f0, and the mismatch between their
generators.  The initial corrective term is

    delta_0 = sum_i dmu_i df0/dz_i + 1/2 sum_ij dsig2_ij d2f0/dz_i dz_j

and later terms follow the recursion delta_n = L delta_{n-1} minus the
discounting term R delta_{n-1} (options; futures drop it).  The price
using k corrective terms is

    f0 + sum_{n<k} (d_n tau^n/n! + delta_n tau^{n+1}/(n+1)!)

where the payoff-mismatch terms d_n are identically zero for every model
in the catalog (baseline payoffs match the true payoffs exactly).
Reported order labels count corrective terms: label 0 is the bare
baseline and label k includes delta_0 through delta_{k-1}, which is how
the reference tables are labeled.

All corrective terms are held symbolically, with the baseline volatility
(eta0 or sigma0) and the horizon T kept as free variables, so a single
expansion is reused across spot grids, maturities and nuisance choices.
"""

import math
from dataclasses import dataclass
from typing import Dict, Tuple

from . import closedform, models, symx
from .models import BaselineEmbedding, ModelParams, SdeModel
from .symx import Expression

MAX_ORDER = 6

# Central-difference step scale (z+1) * 10^(log10(eps)/3 - 1) for double
# precision eps; about 6.06e-7.
_FD_SCALE = 10.0 ** (math.log10(2.220446049250313e-16) / 3.0 - 1.0)


@dataclass(frozen=True)
class KmExpansion:
    true_model: SdeModel
    baseline: BaselineEmbedding
    baseline_price: Expression
    deltas: Tuple[Expression, ...]
    payoff_mismatch: Tuple[Expression, ...]
    rate_in_recursion: str
    order: int


@dataclass(frozen=True)
class OrderedQuote:
    """Price at each truncation level, plus the binding that produced it.

    orders[k] is the price using the first k corrective terms, so
    orders[0] is the bare baseline f0 and an expansion carrying
    delta_0..delta_N reports N+2 levels.  baseline echoes orders[0].
    """

    orders: tuple
    tau: float
    binding: dict
    baseline: float

    @property
    def price(self):
        return self.orders[-1]


@dataclass(frozen=True)
class NuisanceResult:
    eta0: float
    objective: float


class NuisanceSearchError(ValueError):
    """Raised when the nuisance objective has no interior minimum."""


def generator(model, f):
    """Apply the model's infinitesimal generator (with time term) to f.

    Returns df/dt + sum_i mu_i df/dz_i + 1/2 sum_ij sig2_ij d2f/dz_idz_j,
    where sig2 is the correlation-mixed covariance matrix.
    """
    cov = models.covariance(model)
    terms = [symx.differentiate(f, "t")]
    first = {}
    for i, name in enumerate(model.state):
        first[name] = symx.differentiate(f, name)
        terms.append(symx.multiply(model.drift[i], first[name]))
    half = symx.const(0.5)
    for i, name_i in enumerate(model.state):
        for j, name_j in enumerate(model.state):
            entry = cov[i][j]
            if entry is symx.ZERO:
                continue
            second = symx.differentiate(first[name_i], name_j)
            terms.append(symx.multiply(half, entry, second))
    return symx.add(*terms)


def initial_mismatch(true_model, embedding, f0):
    """Generator mismatch applied to the baseline price, delta_0.

    The time-derivative terms of the two generators cancel, leaving the
    drift and covariance differences weighted by derivatives of f0.
    """
    base = embedding.baseline
    if base.state != true_model.state:
        raise ValueError("embedding is not dimension-matched to the true model")
    cov_true = models.covariance(true_model)
    cov_base = models.covariance(base)
    first = {name: symx.differentiate(f0, name) for name in true_model.state}
    terms = []
    for i, name in enumerate(true_model.state):
        dmu = symx.subtract(true_model.drift[i], base.drift[i])
        terms.append(symx.multiply(dmu, first[name]))
    half = symx.const(0.5)
    for i, name_i in enumerate(true_model.state):
        for j, name_j in enumerate(true_model.state):
            dsig = symx.subtract(cov_true[i][j], cov_base[i][j])
            if dsig is symx.ZERO:
                continue
            second = symx.differentiate(first[name_i], name_j)
            terms.append(symx.multiply(half, dsig, second))
    return symx.add(*terms)


def expand(true_model, embedding, f0, order, rate_in_recursion="discounted"):
    """Build the corrective-term series up to the requested order."""
    if order < 0:
        raise ValueError("order must be nonnegative")
    if order > MAX_ORDER:
        raise ValueError(
            "order %d exceeds the supported maximum %d; higher orders blow up "
            "expression size faster than they improve accuracy" % (order, MAX_ORDER))
    if rate_in_recursion not in ("discounted", "undiscounted"):
        raise ValueError("rate_in_recursion must be 'discounted' or 'undiscounted'")
    deltas = [initial_mismatch(true_model, embedding, f0)]
    for _ in range(order):
        nxt = generator(true_model, deltas[-1])
        if rate_in_recursion == "discounted":
            nxt = symx.subtract(nxt, symx.multiply(true_model.short_rate, deltas[-1]))
        deltas.append(nxt)
    zeros = (symx.ZERO,) * (order + 1)
    return KmExpansion(true_model, embedding, f0, tuple(deltas), zeros,
                       rate_in_recursion, order)


def _full_binding(binding, tau):
    b = dict(binding)
    b.setdefault("t", 0.0)
    b.setdefault("T", tau)
    return b


def price(x, binding, tau):
    """Evaluate the expansion, reporting the price at every level.

    orders[k] of the result uses the first k corrective terms (orders[0]
    is the bare baseline).  Binding values may be scalars or equal-shape
    numpy arrays; t defaults to 0 and the horizon T to tau.  Evaluation
    errors are re-raised with the offending term attached.
    """
    if tau <= 0.0:
        raise ValueError("tau must be positive, got %r" % (tau,))
    b = _full_binding(binding, tau)
    f0 = symx.evaluate_many(x.baseline_price, b)
    orders = [f0]
    total = f0
    factorial = 1.0
    for n, (d_n, delta_n) in enumerate(zip(x.payoff_mismatch, x.deltas)):
        try:
            if d_n is not symx.ZERO:
                total = total + symx.evaluate_many(d_n, b) * tau ** n / factorial
            factorial *= n + 1
            total = total + symx.evaluate_many(delta_n, b) * tau ** (n + 1) / factorial
        except symx.SymxError as exc:
            raise symx.SymxError("evaluating corrective term %d: %s" % (n, exc)) from exc
        orders.append(total)
    return OrderedQuote(tuple(orders), tau, b, f0)


def greek(x, binding, tau, variable, order=1):
    """First or second sensitivity of the order-N price to a state variable.

    The baseline contributes its analytic (symbolic) derivative, which is
    zero whenever the baseline does not carry the variable; each
    corrective term the expansion carries contributes a central finite
    difference with step h = (z+1) * 10^(log10(eps)/3 - 1).  The nuisance
    volatility stays at its bound value while the state variable is
    bumped.  An expansion built with order=4 therefore reproduces the
    five-term greek columns of the reference tables.
    """
    if variable not in x.true_model.state:
        raise ValueError("%r is not a state variable of %s"
                         % (variable, x.true_model.name))
    if order not in (1, 2):
        raise ValueError("derivative order must be 1 or 2")
    b = _full_binding(binding, tau)
    z = b[variable]
    h = (z + 1.0) * _FD_SCALE
    up = dict(b)
    up[variable] = z + h
    dn = dict(b)
    dn[variable] = z - h
    seed = symx.differentiate(x.baseline_price, variable)
    if order == 2:
        seed = symx.differentiate(seed, variable)
    total = symx.evaluate_many(seed, b)
    factorial = 1.0
    for n, delta_n in enumerate(x.deltas):
        factorial *= n + 1
        weight = tau ** (n + 1) / factorial
        hi = symx.evaluate_many(delta_n, up)
        lo = symx.evaluate_many(delta_n, dn)
        if order == 1:
            diff = (hi - lo) / (2.0 * h)
        else:
            mid = symx.evaluate_many(delta_n, b)
            diff = (hi - 2.0 * mid + lo) / (h * h)
        total = total + weight * diff
    return total


_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def optimal_nuisance(expansion_for, binding, tau, nuisance="eta0",
                     bracket=(1e-4, 2.0), tol=1e-6):
    """Baseline volatility minimizing (f_N - f0)^2, by golden section.

    expansion_for(eta0) returns the expansion to price at that nuisance
    level; with the catalog recipes the nuisance is symbolic, so the
    callable can ignore its argument and return a cached expansion.
    Raises NuisanceSearchError when the minimum sits on the bracket edge.
    """
    def objective(e0):
        x = expansion_for(e0)
        b = dict(binding)
        b[nuisance] = e0
        q = price(x, b, tau)
        return (q.orders[-1] - q.baseline) ** 2

    lo, hi = bracket
    if not lo < hi:
        raise ValueError("bracket must satisfy lo < hi")
    a, b_ = lo, hi
    c = b_ - _INVPHI * (b_ - a)
    d = a + _INVPHI * (b_ - a)
    fc, fd = objective(c), objective(d)
    while b_ - a > tol:
        if fc < fd:
            b_, d, fd = d, c, fc
            c = b_ - _INVPHI * (b_ - a)
            fc = objective(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b_ - a)
            fd = objective(d)
    xmin, fmin = (c, fc) if fc < fd else (d, fd)
    if xmin - lo < 2.0 * tol or hi - xmin < 2.0 * tol:
        raise NuisanceSearchError(
            "no interior minimum in (%g, %g): objective(lo)=%g, objective(hi)=%g"
            % (lo, hi, objective(lo), objective(hi)))
    return NuisanceResult(xmin, fmin)


def put_from_call_series(x, put_baseline):
    """Reuse a call expansion's corrective terms with a put baseline.

    The corrective series depends only on the generator mismatch, never
    on which side of the payoff seeded f0, so calls and puts share it.
    """
    return KmExpansion(x.true_model, x.baseline, put_baseline, x.deltas,
                       x.payoff_mismatch, x.rate_in_recursion, x.order)


# ---------------------------------------------------------------------------
# Catalog recipes.  Expansions are expensive to build and immutable, so they
# are cached on (model kind, params, strike, order, payoff side).

_SERIES_CACHE: Dict[tuple, KmExpansion] = {}


def _cached(key, build):
    x = _SERIES_CACHE.get(key)
    if x is None:
        x = build()
        _SERIES_CACHE[key] = x
    return x


def _option_series(kind, model_fn, params, strike, order, put):
    def build():
        true = model_fn(params)
        base = models.black_scholes(ModelParams(r=params.r))
        emb = models.embed_baseline(true, base)
        f0 = closedform.bs_call_symbolic(strike, params.r)
        x = expand(true, emb, f0, order)
        if put:
            return put_from_call_series(x, closedform.bs_put_symbolic(strike, params.r))
        return x
    return _cached((kind, params, float(strike), int(order), bool(put)), build)


def heston_call_series(params, strike, order=4, put=False):
    """Expansion for the square-root variance model around Black-Scholes.

    The nuisance volatility stays symbolic as eta0; bind it (typically to
    sqrt of the spot variance) when pricing.  The default order carries
    five corrective terms, the deepest column of the reference tables.
    """
    return _option_series("heston", models.heston, params, strike, order, put)


def cev_call_series(params, strike, order=4, put=False):
    return _option_series("cev", models.cev, params, strike, order, put)


def sz_call_series(params, strike, order=4, put=False):
    """Expansion for the Ornstein-Uhlenbeck volatility model; state
    variables are S and sigma."""
    return _option_series("sz", models.schobel_zhu, params, strike, order, put)


def commodity_futures_series(params, order=4):
    """Futures expansion: mean-reverting log price with stochastic
    variance, seeded on the one-factor closed form.

    The baseline pull speed is set to the true model's eta so only the
    variance structure differs; the baseline volatility stays symbolic
    as sigma0.  The recursion runs undiscounted (futures carry no rF
    term).
    """
    def build():
        true = models.lutz_commodity(params)
        base = models.schwartz1(ModelParams(kappa=params.eta, alpha=params.alpha))
        emb = models.embed_baseline(true, base)
        f0 = closedform.schwartz_futures_symbolic(params.alpha, params.eta)
        return expand(true, emb, f0, order, rate_in_recursion="undiscounted")
    return _cached(("commodity", params, None, int(order), False), build)
