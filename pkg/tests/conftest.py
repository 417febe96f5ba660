"""Shared test machinery.

Holds the deterministic random-expression generator used by the symbolic
property suites and a terminal hook that prints one PASS/FAIL line per
acceptance criterion after the run.
"""

import math

from kmseries import symx

VAR_NAMES = ("x", "y", "z")


def random_expression(rng, depth):
    """Random smooth expression over x, y, z.

    abs/sign stay out of the pool: they put kinks under the
    finite-difference probe.  ln and sqrt wrap exp(.) + shift so their
    arguments stay positive everywhere.
    """
    if depth <= 0 or rng.random() < 0.2:
        if rng.random() < 0.65:
            return symx.var(rng.choice(VAR_NAMES))
        return symx.const(rng.uniform(-3.0, 3.0))
    pick = rng.randrange(10)
    a = random_expression(rng, depth - 1)
    if pick == 0:
        return symx.add(a, random_expression(rng, depth - 1))
    if pick == 1:
        return symx.subtract(a, random_expression(rng, depth - 1))
    if pick == 2:
        return symx.multiply(a, random_expression(rng, depth - 1))
    if pick == 3:
        return symx.divide(a, symx.add(symx.exp(random_expression(rng, depth - 2)),
                                       symx.const(rng.uniform(0.5, 2.0))))
    if pick == 4:
        return symx.power(a, symx.const(float(rng.randrange(-3, 4))))
    if pick == 5:
        return symx.exp(symx.multiply(symx.const(0.25), a))
    if pick == 6:
        return symx.ln(symx.add(symx.exp(a), symx.const(rng.uniform(0.5, 2.0))))
    if pick == 7:
        return symx.sqrt(symx.add(symx.exp(a), symx.const(rng.uniform(0.5, 2.0))))
    if pick == 8:
        return symx.normal_cdf(a)
    return symx.normal_pdf(a)


def random_unrestricted_expression(rng, depth):
    """Like random_expression but abs and sign are allowed (the value
    preservation suite does not differentiate anything)."""
    if depth <= 0 or rng.random() < 0.3:
        base = random_expression(rng, 0)
    else:
        base = random_expression(rng, depth)
    roll = rng.random()
    if roll < 0.15:
        return symx.abs_(base)
    if roll < 0.25:
        return symx.sign(base)
    return base


def random_binding(rng):
    return {name: rng.uniform(-2.5, 2.5) for name in VAR_NAMES}


def fd_derivative(e, binding, variable, h):
    up = dict(binding)
    up[variable] = binding[variable] + h
    dn = dict(binding)
    dn[variable] = binding[variable] - h
    return (symx.evaluate(e, up) - symx.evaluate(e, dn)) / (2.0 * h)


def run_fd_agreement_cases(seed, n_cases, rtol):
    """Count cases where the symbolic derivative disagrees with a central
    difference by more than rtol (relative to max(1, |value|)).

    DomainError points and wild magnitudes are resampled, so the count
    of compared cases is exactly n_cases.
    """
    import random as _random

    rng = _random.Random(seed)
    failures = []
    done = attempts = 0
    while done < n_cases:
        attempts += 1
        if attempts > 50 * n_cases:
            raise AssertionError("case generation kept hitting domain errors")
        e = random_expression(rng, rng.randrange(1, 4))
        variable = rng.choice(VAR_NAMES)
        binding = random_binding(rng)
        try:
            d = symx.differentiate(e, variable)
            sym = symx.evaluate(d, binding)
            h = 1e-6 * (1.0 + abs(binding[variable]))
            fd = fd_derivative(e, binding, variable, h)
        except symx.SymxError:
            continue
        if abs(sym) > 1e8 or abs(fd) > 1e8:
            continue
        done += 1
        gap = abs(sym - fd) / max(1.0, abs(sym))
        if gap > rtol:
            failures.append((symx.to_text(e, 80), variable, binding, sym, fd))
    return failures


def run_simplify_cases(seed, n_cases, atol):
    """Count simplify() value changes beyond atol relative to max(1, |v|)."""
    import random as _random

    rng = _random.Random(seed)
    failures = []
    done = attempts = 0
    while done < n_cases:
        attempts += 1
        if attempts > 50 * n_cases:
            raise AssertionError("case generation kept hitting domain errors")
        e = random_unrestricted_expression(rng, rng.randrange(1, 5))
        binding = random_binding(rng)
        try:
            raw = symx.evaluate(e, binding)
            cooked = symx.evaluate(symx.simplify(e), binding)
        except symx.SymxError:
            continue
        if not math.isfinite(raw) or abs(raw) > 1e10:
            continue
        done += 1
        if abs(raw - cooked) > atol * max(1.0, abs(raw)):
            failures.append((symx.to_text(e, 80), binding, raw, cooked))
    return failures


# --- acceptance criterion reporting ---------------------------------------

_ACCEPTANCE = {}


def pytest_runtest_logreport(report):
    name = report.nodeid.rsplit("::", 1)[-1]
    if "test_acceptance" not in report.nodeid or not name.startswith("test_criterion"):
        return
    if report.when == "call" or report.outcome == "failed":
        prev = _ACCEPTANCE.get(name)
        if prev != "failed":
            _ACCEPTANCE[name] = report.outcome


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_ACCEPTANCE):
        parts = name.split("_")
        number = parts[2]
        label = "-".join(parts[3:])
        verdict = "PASS" if _ACCEPTANCE[name] == "passed" else "FAIL"
        terminalreporter.write_line("ACCEPTANCE %s %s: %s" % (number, label, verdict))
