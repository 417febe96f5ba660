"""Command line front end.

Subcommands: price, greeks, mc, diagnose, expand, run.  Machine output
(CSV rows, single numbers) goes to stdout or --out; check summaries for
`run` go to stderr so artifacts stay clean.

Model parameters are assembled in three layers: a named --preset, an
optional flat key=value config file, then repeated --set key=value
overrides.  Delta and gamma are printed in percent to match the
reference tables; vega is absolute.
"""

import argparse
import math
import sys
from dataclasses import replace

from . import diagnostics, expansion, experiments, fourier, mc, reference
from .closedform import bs_call, bs_put, schwartz_futures
from .models import ModelParams
from .symx import dag_size, node_count, to_text

_PARAM_KEYS = ("kappa", "theta", "omega", "rho", "r", "v0", "gamma",
               "sigma0", "eta", "alpha", "eta0")
_EXTRA_KEYS = ("spot", "strike", "tau", "x0", "steps", "paths", "price")
_KNOWN_KEYS = _PARAM_KEYS + _EXTRA_KEYS

PRESETS = {
    "hest-table": (reference.HESTON_TABLE_PARAMS,
                   {"spot": 1000.0, "strike": reference.HESTON_TABLE_STRIKE,
                    "tau": reference.HESTON_TABLE_TAU}),
    "hest-fig": (reference.HESTON_CONVERGENCE_PARAMS,
                 {"spot": 100.0, "strike": reference.HESTON_CONVERGENCE_STRIKE,
                  "tau": reference.HESTON_CONVERGENCE_TAU}),
    "sz-table": (reference.SZ_TABLE_PARAMS,
                 {"spot": 100.0, "strike": reference.SZ_TABLE_STRIKE,
                  "tau": reference.SZ_TABLE_TAU}),
    "sz-rho0": (reference.SZ_UNCORRELATED_PARAMS,
                {"spot": 100.0, "strike": reference.SZ_TABLE_STRIKE,
                 "tau": reference.SZ_TABLE_TAU}),
    "sz-stress": (reference.SZ_STRESS_PARAMS,
                  {"spot": 100.0, "strike": reference.SZ_STRESS_STRIKE,
                   "tau": reference.SZ_STRESS_TAU}),
    "commodity": (reference.COMMODITY_PARAMS,
                  {"x0": reference.COMMODITY_X0, "tau": 0.5}),
}


class CliError(Exception):
    pass


def _parse_value(text):
    try:
        return float(text)
    except ValueError:
        raise CliError("expected a number, got %r" % text)


def _collect_options(args):
    """Merge preset, config file and --set pairs into one dict."""
    options = {}
    if getattr(args, "preset", None):
        params, extras = PRESETS[args.preset]
        for key in _PARAM_KEYS:
            value = getattr(params, key, None)
            if value is not None:
                options[key] = value
        options.update(extras)
    if getattr(args, "config", None):
        with open(args.config) as handle:
            for lineno, line in enumerate(handle, 1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise CliError("%s:%d: expected key=value, got %r"
                                   % (args.config, lineno, line))
                key, _, value = line.partition("=")
                key = key.strip()
                if key not in _KNOWN_KEYS:
                    raise CliError("%s:%d: unknown key %r"
                                   % (args.config, lineno, key))
                options[key] = _parse_value(value.strip())
    for pair in getattr(args, "set", None) or ():
        if "=" not in pair:
            raise CliError("--set expects key=value, got %r" % pair)
        key, _, value = pair.partition("=")
        if key not in _KNOWN_KEYS:
            raise CliError("unknown key %r (known: %s)"
                           % (key, ", ".join(_KNOWN_KEYS)))
        options[key] = _parse_value(value)
    return options


def _params(options):
    fields = {k: options[k] for k in _PARAM_KEYS if k in options
              and k != "eta0"}
    return ModelParams(**fields)


def _need(options, *keys):
    missing = [k for k in keys if k not in options]
    if missing:
        raise CliError("missing required option(s): %s (use --preset, "
                       "--config or --set)" % ", ".join(missing))
    return [options[k] for k in keys]


def _emit(text, out):
    if out:
        with open(out, "w") as handle:
            handle.write(text if text.endswith("\n") else text + "\n")
    else:
        print(text)


def _series_for(model, params, strike, order, put=False):
    if model in ("heston", "cev"):
        recipe = (expansion.cev_call_series if model == "cev"
                  else expansion.heston_call_series)
        return recipe(params, strike, order=order, put=put)
    if model == "sz":
        return expansion.sz_call_series(params, strike, order=order, put=put)
    if model == "commodity":
        return expansion.commodity_futures_series(params, order=order)
    raise CliError("no expansion recipe for model %r" % model)


def _binding_for(model, options):
    if model in ("heston", "cev"):
        spot, v0 = _need(options, "spot", "v0")
        eta0 = options.get("eta0", math.sqrt(v0))
        return {"S": spot, "v": v0, "eta0": eta0}
    if model == "sz":
        spot, sigma0 = _need(options, "spot", "sigma0")
        return {"S": spot, "sigma": sigma0,
                "eta0": options.get("eta0", sigma0)}
    if model == "commodity":
        if "x0" not in options and "spot" in options:
            options["x0"] = math.log(options["spot"])
        x0, v0, sigma0 = _need(options, "x0", "v0", "sigma0")
        return {"X": x0, "v": v0, "sigma0": sigma0}
    raise CliError("no state binding for model %r" % model)


def _mc_result(model, params, options, args):
    config = mc.McConfig()
    overrides = {}
    if "steps" in options:
        overrides["steps"] = int(options["steps"])
    if "paths" in options:
        overrides["paths"] = int(options["paths"])
    if args.seed is not None:
        overrides["seed"] = args.seed
    if getattr(args, "boundary", None):
        overrides["boundary"] = args.boundary
    if model == "commodity" and "steps" not in options:
        overrides.setdefault("steps", 1000)
        overrides.setdefault("paths", int(options.get("paths", 200000)))
    if overrides:
        config = replace(config, **overrides)
    if model == "heston":
        params = replace(params, gamma=0.5)
        model = "cev"
    if model == "cev":
        spot, strike, tau = _need(options, "spot", "strike", "tau")
        return mc.simulate_cev_call(params, spot, strike, tau, config)
    if model == "sz":
        spot, strike, tau = _need(options, "spot", "strike", "tau")
        return mc.simulate_sz_call(params, spot, strike, tau, config)
    if model == "commodity":
        if "x0" not in options and "spot" in options:
            options["x0"] = math.log(options["spot"])
        x0, tau = _need(options, "x0", "tau")
        return mc.simulate_commodity_futures(params, x0, tau, config)
    raise CliError("no simulator for model %r" % model)


def _cmd_price(args):
    options = _collect_options(args)
    params = _params(options)
    model, method = args.model, args.method
    if model == "bs":
        spot, strike, tau = _need(options, "spot", "strike", "tau")
        sigma = options.get("sigma0") or options.get("eta0")
        if sigma is None:
            raise CliError("bs needs sigma0 or eta0")
        pricer = bs_put if args.put else bs_call
        quote = pricer(spot, strike, options.get("r", 0.0), sigma, tau).price
        _emit(repr(quote), args.out)
        return 0
    if method == "km":
        strike = options.get("strike")
        if model != "commodity":
            (strike,) = _need(options, "strike")
        series = _series_for(model, params, strike, args.order, args.put)
        binding = _binding_for(model, options)
        (tau,) = _need(options, "tau")
        quote = expansion.price(series, binding, tau)
        _emit(repr(quote.orders[args.order + 1]), args.out)
        return 0
    if method == "ft":
        (tau,) = _need(options, "tau")
        if model == "heston":
            spot, strike = _need(options, "spot", "strike")
            fn = fourier.heston_put_ft if args.put else fourier.heston_call_ft
            _emit(repr(fn(params, spot, strike, tau)), args.out)
            return 0
        if model == "sz":
            if args.put:
                raise CliError("ft puts are only wired for model heston")
            spot, strike = _need(options, "spot", "strike")
            _emit(repr(fourier.sz_call_ft(params, spot, strike, tau)),
                  args.out)
            return 0
        raise CliError("ft method supports heston and sz only")
    if method == "mc":
        result = _mc_result(model, params, options, args)
        _emit(repr(result.estimate), args.out)
        return 0
    if method == "closed":
        (tau,) = _need(options, "tau")
        binding = _binding_for(model, options)
        if model == "commodity":
            quote = schwartz_futures(binding["X"], params.alpha, params.eta,
                                     binding["sigma0"], tau).price
            _emit(repr(quote), args.out)
            return 0
        (strike,) = _need(options, "strike")
        pricer = bs_put if args.put else bs_call
        quote = pricer(binding["S"], strike, options.get("r", 0.0),
                       binding["eta0"], tau).price
        _emit(repr(quote), args.out)
        return 0
    raise CliError("unknown method %r" % method)


def _cmd_greeks(args):
    options = _collect_options(args)
    params = _params(options)
    model = args.model
    spot, strike, tau = _need(options, "spot", "strike", "tau")
    if args.method == "ft":
        if model == "heston":
            delta, gamma, vega = fourier.heston_greeks_ft(params, spot,
                                                          strike, tau)
        elif model == "sz":
            delta = experiments._sz_ft_greek(params, spot, strike, tau,
                                             "delta")
            gamma = experiments._sz_ft_greek(params, spot, strike, tau,
                                             "gamma")
            vega = experiments._sz_ft_greek(params, spot, strike, tau, "vega")
        else:
            raise CliError("ft greeks support heston and sz only")
    else:
        series = _series_for(model, params, strike, args.order)
        binding = _binding_for(model, options)
        variable = "sigma" if model == "sz" else "v"
        delta = expansion.greek(series, binding, tau, "S", order=1)
        gamma = expansion.greek(series, binding, tau, "S", order=2)
        vega = expansion.greek(series, binding, tau, variable, order=1)
    _emit("delta_pct,gamma_pct,vega\n%r,%r,%r"
          % (delta * 100.0, gamma * 100.0, vega), args.out)
    return 0


def _cmd_mc(args):
    options = _collect_options(args)
    params = _params(options)
    result = _mc_result(args.model, params, options, args)
    config = result.config
    _emit("estimate,standard_error,ci_low,ci_high,negative_variance_events,"
          "steps,paths,seed,scheme,boundary\n"
          "%r,%r,%r,%r,%d,%d,%d,%d,%s,%s"
          % (result.estimate, result.standard_error, result.ci_low,
             result.ci_high, result.negative_variance_events, config.steps,
             config.paths, config.seed, config.scheme, config.boundary),
          args.out)
    return 0


def _cmd_diagnose(args):
    options = _collect_options(args)
    params = _params(options)
    lines = ["check,result,detail"]
    if params.kappa is not None and params.theta is not None \
            and params.omega is not None:
        ok, stat = diagnostics.feller_check(params.kappa, params.theta,
                                            params.omega)
        lines.append("feller,%s,statistic=%r" % ("satisfied" if ok
                                                 else "violated", stat))
    if params.gamma is not None and params.gamma > 0:
        for v in (1e-4, 1.0, 1e6):
            theta_v = diagnostics.cev_scale_density(
                params.kappa, params.theta, params.omega, params.gamma, v)
            lines.append("scale-density,%r,v=%r" % (theta_v, v))
        lower, upper = diagnostics.boundary_attainability(params)
        lines.append("boundary-0,%s,evidence=%s"
                     % (lower.verdict, list(lower.evidence)))
        lines.append("boundary-inf,%s,evidence=%s"
                     % (upper.verdict, list(upper.evidence)))
    if "price" in options:
        spot, strike, tau = _need(options, "spot", "strike", "tau")
        vol = diagnostics.bs_implied_vol(options["price"], spot, strike,
                                         options.get("r", 0.0), tau)
        lines.append("implied-vol,%r,price=%r" % (vol, options["price"]))
    if len(lines) == 1:
        raise CliError("nothing to diagnose; provide kappa/theta/omega, "
                       "gamma, or price")
    _emit("\n".join(lines), args.out)
    return 0


def _cmd_expand(args):
    options = _collect_options(args)
    params = _params(options)
    strike = options.get("strike", 100.0)
    series = _series_for(args.model, params, strike, args.order)
    lines = ["term,node_count,dag_size"]
    lines.append("f0,%d,%d" % (node_count(series.baseline_price),
                               dag_size(series.baseline_price)))
    for n, delta in enumerate(series.deltas):
        lines.append("delta_%d,%d,%d" % (n, node_count(delta),
                                         dag_size(delta)))
    _emit("\n".join(lines), args.out)
    if args.dump:
        for n, delta in enumerate(series.deltas):
            print("delta_%d = %s" % (n, to_text(delta)))
    return 0


def _cmd_run(args):
    result = experiments.run(args.experiment, seed=args.seed,
                             mc_profile=args.mc_profile)
    if args.out:
        with open(args.out, "w") as handle:
            experiments.write_csv(result, handle,
                                  include_timestamp=not args.no_header_timestamp)
    else:
        experiments.write_csv(result, sys.stdout,
                              include_timestamp=not args.no_header_timestamp)
    passed = sum(1 for c in result.checks if c.passed)
    for check in result.checks:
        if not check.passed:
            print("CHECK %s: FAIL (%s)" % (check.name, check.detail),
                  file=sys.stderr)
    print("experiment %s: %s (%d/%d checks)"
          % (result.experiment, "PASS" if result.passed else "FAIL",
             passed, len(result.checks)), file=sys.stderr)
    return 0 if result.passed else 1


def _add_param_args(parser):
    parser.add_argument("--preset", choices=sorted(PRESETS))
    parser.add_argument("--config", help="flat key=value file")
    parser.add_argument("--set", action="append", metavar="KEY=VALUE",
                        help="override a single option")
    parser.add_argument("--out", help="write output to this file")
    parser.add_argument("--seed", type=int)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="kmseries",
        description="Series-expansion pricing with reference solvers.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_price = sub.add_parser("price", help="single quote")
    p_price.add_argument("--model", required=True,
                         choices=("heston", "cev", "sz", "commodity", "bs"))
    p_price.add_argument("--method", default="km",
                         choices=("km", "ft", "mc", "closed"))
    p_price.add_argument("--order", type=int, default=4,
                         help="corrective terms delta_0..delta_N (km only)")
    p_price.add_argument("--put", action="store_true")
    p_price.add_argument("--boundary", choices=("reflective", "absorbing"))
    _add_param_args(p_price)
    p_price.set_defaults(fn=_cmd_price)

    p_greeks = sub.add_parser("greeks", help="delta, gamma, vega")
    p_greeks.add_argument("--model", required=True,
                          choices=("heston", "cev", "sz"))
    p_greeks.add_argument("--method", default="km", choices=("km", "ft"))
    p_greeks.add_argument("--order", type=int, default=4)
    _add_param_args(p_greeks)
    p_greeks.set_defaults(fn=_cmd_greeks)

    p_mc = sub.add_parser("mc", help="Monte Carlo run with CI")
    p_mc.add_argument("--model", required=True,
                      choices=("heston", "cev", "sz", "commodity"))
    p_mc.add_argument("--boundary", choices=("reflective", "absorbing"))
    _add_param_args(p_mc)
    p_mc.set_defaults(fn=_cmd_mc)

    p_diag = sub.add_parser("diagnose", help="model diagnostics report")
    _add_param_args(p_diag)
    p_diag.set_defaults(fn=_cmd_diagnose)

    p_expand = sub.add_parser("expand", help="inspect corrective terms")
    p_expand.add_argument("--model", required=True,
                          choices=("heston", "cev", "sz", "commodity"))
    p_expand.add_argument("--order", type=int, default=4)
    p_expand.add_argument("--dump", action="store_true",
                          help="print each term's expression")
    _add_param_args(p_expand)
    p_expand.set_defaults(fn=_cmd_expand)

    p_run = sub.add_parser("run", help="run a registered experiment")
    p_run.add_argument("experiment")
    p_run.add_argument("--seed", type=int)
    p_run.add_argument("--out")
    p_run.add_argument("--no-header-timestamp", action="store_true")
    p_run.add_argument("--mc-profile", default="full",
                       choices=("full", "reduced"))
    p_run.set_defaults(fn=_cmd_run)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (CliError, KeyError, ValueError, OSError) as exc:
        detail = exc.args[0] if exc.args else exc
        print("error: %s" % detail, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
