"""SDE model catalog and correlation-decomposition machinery.

Every model is a small immutable record: drift and diffusion entries are
expressions over the state variables, the correlation matrix holds plain
floats, and the short rate is an expression (a constant for every model
in the catalog).  Diffusion matrices are stated before correlation
mixing; covariance() applies the lower-triangular decomposition of the
correlation matrix and returns sigma sigma'.

Admissible regions (S > 0, v > 0 or sigma > 0) are enforced at
evaluation time by the expression engine, not at construction, so a
model object can be built once and priced over any grid.
"""

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from . import symx
from .symx import Expression


@dataclass(frozen=True)
class ModelParams:
    """Named real parameters; each model reads the subset it needs."""

    kappa: Optional[float] = None
    theta: Optional[float] = None
    omega: Optional[float] = None
    rho: Optional[float] = None
    r: Optional[float] = None
    v0: Optional[float] = None
    gamma: Optional[float] = None
    sigma0: Optional[float] = None
    eta: Optional[float] = None
    alpha: Optional[float] = None
    eta0: Optional[float] = None


@dataclass(frozen=True)
class SdeModel:
    name: str
    state: Tuple[str, ...]
    drift: Tuple[Expression, ...]
    diffusion: Tuple[Tuple[Expression, ...], ...]
    correlation: Tuple[Tuple[float, ...], ...]
    short_rate: Expression

    def __post_init__(self):
        n = len(self.state)
        if len(self.drift) != n:
            raise ValueError("drift length %d does not match %d state variables"
                             % (len(self.drift), n))
        if len(self.diffusion) != n or any(len(row) != n for row in self.diffusion):
            raise ValueError("diffusion must be %dx%d" % (n, n))
        _validate_correlation(self.correlation, n)

    @property
    def dim(self):
        return len(self.state)


@dataclass(frozen=True)
class BaselineEmbedding:
    """A baseline model padded up to the true model's dimension.

    `padding` lists the true-model state variables the baseline does not
    carry; their drift entries and diffusion rows/columns are the zero
    expression.
    """

    baseline: SdeModel
    padding: Tuple[str, ...]


def _validate_correlation(corr, n):
    if len(corr) != n or any(len(row) != n for row in corr):
        raise ValueError("correlation must be %dx%d" % (n, n))
    arr = np.asarray(corr, dtype=float)
    if not np.allclose(arr, arr.T, atol=1e-12):
        raise ValueError("correlation matrix must be symmetric")
    if not np.allclose(np.diag(arr), 1.0, atol=1e-12):
        raise ValueError("correlation matrix must have a unit diagonal")
    if np.any(np.abs(arr) > 1.0 + 1e-12):
        raise ValueError("correlation entries must lie in [-1, 1]")
    if n > 1 and np.linalg.eigvalsh(arr).min() < -1e-12:
        raise ValueError("correlation matrix is not positive semi-definite")


def _correlation_root(corr):
    """Lower-triangular root L with corr = L L'."""
    n = len(corr)
    if n == 1:
        return [[1.0]]
    if n == 2:
        rho = float(corr[0][1])
        return [[1.0, 0.0], [rho, math.sqrt(max(0.0, 1.0 - rho * rho))]]
    arr = np.asarray(corr, dtype=float)
    try:
        return np.linalg.cholesky(arr).tolist()
    except np.linalg.LinAlgError:
        # Semi-definite but singular: fall back to the eigen square root,
        # which still satisfies L L' = corr.
        w, q = np.linalg.eigh(arr)
        return (q * np.sqrt(np.clip(w, 0.0, None))).tolist()


def covariance(model):
    """Covariance matrix sigma sigma' as expressions.

    The independent drivers are mixed through the lower-triangular root
    of the correlation matrix (2x2 case: [[1, 0], [rho, sqrt(1-rho^2)]]),
    then the mixed diffusion is multiplied by its own transpose.
    """
    n = model.dim
    root = _correlation_root(model.correlation)
    mixed = [[symx.ZERO] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            terms = []
            for k in range(n):
                if root[k][j] != 0.0:
                    terms.append(symx.multiply(model.diffusion[i][k], symx.const(root[k][j])))
            mixed[i][j] = symx.add(*terms) if terms else symx.ZERO
    cov = [[symx.ZERO] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            entry = symx.add(*[symx.multiply(mixed[i][k], mixed[j][k]) for k in range(n)])
            cov[i][j] = entry
            cov[j][i] = entry
    return tuple(tuple(row) for row in cov)


def _require(params, model_name, *names):
    for name in names:
        if getattr(params, name) is None:
            raise ValueError("%s requires parameter %s" % (model_name, name))


def _check_domains(params, model_name):
    checks = (("omega", lambda x: x >= 0.0, ">= 0"),
              ("kappa", lambda x: x >= 0.0, ">= 0"),
              ("theta", lambda x: x >= 0.0, ">= 0"),
              ("eta", lambda x: x >= 0.0, ">= 0"),
              ("rho", lambda x: abs(x) <= 1.0, "in [-1, 1]"))
    for name, ok, phrase in checks:
        value = getattr(params, name)
        if value is not None and not ok(value):
            raise ValueError("%s: parameter %s must be %s, got %r"
                             % (model_name, name, phrase, value))


def _corr2(rho):
    return ((1.0, rho), (rho, 1.0))


def heston(params):
    """Square-root stochastic variance under geometric spot dynamics."""
    _require(params, "heston", "kappa", "theta", "omega", "rho", "r")
    _check_domains(params, "heston")
    s, v = symx.var("S"), symx.var("v")
    drift = (symx.multiply(symx.const(params.r), s),
             symx.multiply(symx.const(params.kappa), symx.subtract(symx.const(params.theta), v)))
    diffusion = ((symx.multiply(symx.sqrt(v), s), symx.ZERO),
                 (symx.ZERO, symx.multiply(symx.const(params.omega), symx.sqrt(v))))
    return SdeModel("heston", ("S", "v"), drift, diffusion, _corr2(params.rho),
                    symx.const(params.r))


def cev(params):
    """Heston with the variance diffusion exponent freed: omega |v|^gamma.

    The absolute value is kept in the diffusion even though pricing stays
    on v > 0; the simulation module relies on it.
    """
    _require(params, "cev", "kappa", "theta", "omega", "rho", "r", "gamma")
    _check_domains(params, "cev")
    if params.gamma <= 0.0:
        raise ValueError("cev: parameter gamma must be positive, got %r" % (params.gamma,))
    s, v = symx.var("S"), symx.var("v")
    drift = (symx.multiply(symx.const(params.r), s),
             symx.multiply(symx.const(params.kappa), symx.subtract(symx.const(params.theta), v)))
    diffusion = ((symx.multiply(symx.sqrt(v), s), symx.ZERO),
                 (symx.ZERO, symx.multiply(symx.const(params.omega),
                                           symx.power(symx.abs_(v), symx.const(params.gamma)))))
    return SdeModel("cev", ("S", "v"), drift, diffusion, _corr2(params.rho),
                    symx.const(params.r))


def schobel_zhu(params):
    """Mean-reverting Gaussian volatility (not variance) on geometric spot."""
    _require(params, "schobel_zhu", "kappa", "theta", "omega", "rho", "r")
    _check_domains(params, "schobel_zhu")
    s, sig = symx.var("S"), symx.var("sigma")
    drift = (symx.multiply(symx.const(params.r), s),
             symx.multiply(symx.const(params.kappa), symx.subtract(symx.const(params.theta), sig)))
    diffusion = ((symx.multiply(sig, s), symx.ZERO),
                 (symx.ZERO, symx.const(params.omega)))
    return SdeModel("schobel_zhu", ("S", "sigma"), drift, diffusion, _corr2(params.rho),
                    symx.const(params.r))


def lutz_commodity(params):
    """Mean-reverting log price with square-root stochastic variance.

    State is (X, v) with X the log spot.  The X drift carries the usual
    -v/2 convexity term on top of the pull toward alpha.  Futures carry
    no discounting, so the short rate is the zero expression.
    """
    _require(params, "lutz_commodity", "eta", "alpha", "kappa", "theta", "omega", "rho")
    _check_domains(params, "lutz_commodity")
    x, v = symx.var("X"), symx.var("v")
    drift = (symx.subtract(
                 symx.multiply(symx.const(params.eta), symx.subtract(symx.const(params.alpha), x)),
                 symx.multiply(symx.const(0.5), v)),
             symx.multiply(symx.const(params.kappa), symx.subtract(symx.const(params.theta), v)))
    diffusion = ((symx.sqrt(v), symx.ZERO),
                 (symx.ZERO, symx.multiply(symx.const(params.omega), symx.sqrt(v))))
    return SdeModel("lutz_commodity", ("X", "v"), drift, diffusion, _corr2(params.rho),
                    symx.ZERO)


def black_scholes(params):
    """Geometric Brownian motion, the usual option baseline.

    When params.eta0 is None the volatility stays symbolic under the
    name eta0, which is how the expansion keeps the nuisance parameter
    free; pass a number to pin it.
    """
    _require(params, "black_scholes", "r")
    _check_domains(params, "black_scholes")
    s = symx.var("S")
    vol = symx.var("eta0") if params.eta0 is None else symx.const(params.eta0)
    drift = (symx.multiply(symx.const(params.r), s),)
    diffusion = ((symx.multiply(vol, s),),)
    return SdeModel("black_scholes", ("S",), drift, diffusion, ((1.0,),),
                    symx.const(params.r))


def schwartz1(params):
    """One-factor mean-reverting log price, the futures baseline.

    params.sigma0 = None keeps the volatility symbolic under the name
    sigma0, mirroring black_scholes.
    """
    _require(params, "schwartz1", "kappa", "alpha")
    _check_domains(params, "schwartz1")
    x = symx.var("X")
    vol = symx.var("sigma0") if params.sigma0 is None else symx.const(params.sigma0)
    drift = (symx.multiply(symx.const(params.kappa), symx.subtract(symx.const(params.alpha), x)),)
    diffusion = ((vol,),)
    return SdeModel("schwartz1", ("X",), drift, diffusion, ((1.0,),), symx.ZERO)


def embed_baseline(true_model, base):
    """Pad a baseline model up to the true model's state vector.

    Every true-model variable the baseline lacks gets a zero drift entry
    and zero diffusion row/column, so the padded covariance vanishes
    there as well.
    """
    missing = [name for name in base.state if name not in true_model.state]
    if missing:
        raise ValueError("baseline variable(s) %s not present in true model %s"
                         % (", ".join(missing), true_model.name))
    n = true_model.dim
    index = {name: base.state.index(name) for name in base.state}
    drift = []
    diffusion = []
    correlation = []
    for i, name_i in enumerate(true_model.state):
        if name_i in index:
            bi = index[name_i]
            drift.append(base.drift[bi])
            diffusion.append(tuple(
                base.diffusion[bi][index[name_j]] if name_j in index else symx.ZERO
                for name_j in true_model.state))
            correlation.append(tuple(
                base.correlation[bi][index[name_j]] if name_j in index
                else (1.0 if i == j else 0.0)
                for j, name_j in enumerate(true_model.state)))
        else:
            drift.append(symx.ZERO)
            diffusion.append((symx.ZERO,) * n)
            correlation.append(tuple(1.0 if i == j else 0.0 for j in range(n)))
    padded = SdeModel(base.name + "+pad", true_model.state, tuple(drift),
                      tuple(diffusion), tuple(correlation), base.short_rate)
    padding = tuple(name for name in true_model.state if name not in index)
    return BaselineEmbedding(padded, padding)
