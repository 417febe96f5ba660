"""Minimal symbolic expression kernel.

Expressions are immutable, hash-consed trees built through smart constructors
that normalize as they go: n-ary sums and products are flattened, constants
fold, like terms collect with float coefficients, zero annihilates products.
Normalization only ever rewrites in value-preserving (or domain-widening)
directions, never domain-narrowing ones, so evaluation agrees with the naive
tree at every binding where the naive tree has a value.

Node kinds: constant, variable, add, multiply, divide, power, exp, ln, sqrt,
abs, sign, normal_pdf, normal_cdf.  ``negate`` and ``subtract`` are accepted by
the constructors and normalized to multiply/add forms.  ``sign`` exists so the
kind set is closed under differentiation (d/dx abs x = sign x, sign(0) = 0).
"""

from __future__ import annotations

import math


class SymxError(Exception):
    """Base class for expression kernel errors."""


class UnboundVariableError(SymxError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"unbound variable: {name!r}")


class DomainError(SymxError):
    """Evaluation hit a domain violation or non-finite intermediate."""

    def __init__(self, message, subexpression=None):
        self.subexpression = subexpression
        if subexpression is not None:
            message = f"{message} in {to_text(subexpression, max_len=120)}"
        super().__init__(message)


_INTERN: dict = {}

_INV_SQRT_2PI = 0.3989422804014327
_SQRT1_2 = math.sqrt(0.5)


class Expression:
    """One interned node of an expression DAG.

    Do not call directly; use the constructor functions (const, var, add, ...).
    Identity equality is structural equality because nodes are interned.
    """

    __slots__ = ("kind", "value", "name", "children")

    def __init__(self, kind, value, name, children):
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "value", value)
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "children", children)

    def __setattr__(self, key, val):
        raise AttributeError("expressions are immutable")

    def __repr__(self):
        return f"Expression({to_text(self, max_len=80)})"

    # Operator sugar, used heavily when assembling model coefficients.
    def __add__(self, other):
        return add(self, _coerce(other))

    def __radd__(self, other):
        return add(_coerce(other), self)

    def __sub__(self, other):
        return subtract(self, _coerce(other))

    def __rsub__(self, other):
        return subtract(_coerce(other), self)

    def __mul__(self, other):
        return multiply(self, _coerce(other))

    def __rmul__(self, other):
        return multiply(_coerce(other), self)

    def __truediv__(self, other):
        return divide(self, _coerce(other))

    def __rtruediv__(self, other):
        return divide(_coerce(other), self)

    def __pow__(self, other):
        return power(self, _coerce(other))

    def __neg__(self):
        return negate(self)


def _coerce(x):
    if isinstance(x, Expression):
        return x
    return const(x)


def _node(kind, value=None, name=None, children=()):
    key = (kind, value, name, tuple(id(c) for c in children))
    found = _INTERN.get(key)
    if found is None:
        found = Expression(kind, value, name, tuple(children))
        _INTERN[key] = found
    return found


# ---------------------------------------------------------------------------
# constructors


def const(x) -> Expression:
    x = float(x)
    if not math.isfinite(x):
        raise SymxError(f"constant must be finite, got {x}")
    return _node("constant", value=x)


ZERO = const(0.0)
ONE = const(1.0)
MINUS_ONE = const(-1.0)


def var(name: str) -> Expression:
    if not name or not isinstance(name, str):
        raise SymxError(f"variable name must be a non-empty string, got {name!r}")
    return _node("variable", name=name)


def _split_term(e):
    """Return (coefficient, core or None) so that e == coefficient * core."""
    if e.kind == "constant":
        return e.value, None
    if e.kind == "multiply" and e.children[0].kind == "constant":
        rest = e.children[1:]
        core = rest[0] if len(rest) == 1 else _node("multiply", children=rest)
        return e.children[0].value, core
    return 1.0, e


def add(*terms) -> Expression:
    flat = []
    stack = [_coerce(t) for t in reversed(terms)]
    while stack:
        t = stack.pop()
        if t.kind == "add":
            stack.extend(reversed(t.children))
        else:
            flat.append(t)

    const_sum = 0.0
    coeffs: dict[Expression, float] = {}
    for t in flat:
        c, core = _split_term(t)
        if core is None:
            const_sum += c
        else:
            coeffs[core] = coeffs.get(core, 0.0) + c

    out = []
    if const_sum != 0.0:
        out.append(const(const_sum))
    for core, c in coeffs.items():
        if c == 0.0:
            continue
        if c == 1.0:
            out.append(core)
        else:
            out.append(multiply(const(c), core))

    if not out:
        return ZERO
    if len(out) == 1:
        return out[0]
    return _node("add", children=out)


def _split_factor(e):
    """Return (base, numeric exponent) with exponent combination allowed
    only for positive exponents (safe against domain changes at base 0)."""
    if e.kind == "power" and e.children[1].kind == "constant":
        c = e.children[1].value
        if c > 0.0:
            return e.children[0], c
    return e, 1.0


def multiply(*factors) -> Expression:
    flat = []
    stack = [_coerce(f) for f in reversed(factors)]
    while stack:
        f = stack.pop()
        if f.kind == "multiply":
            stack.extend(reversed(f.children))
        else:
            flat.append(f)

    const_prod = 1.0
    exps: dict[Expression, float] = {}
    order: list[Expression] = []
    for f in flat:
        if f.kind == "constant":
            const_prod *= f.value
            continue
        base, e = _split_factor(f)
        if base not in exps:
            order.append(base)
            exps[base] = 0.0
        exps[base] += e

    if const_prod == 0.0:
        return ZERO

    out = []
    if const_prod != 1.0:
        out.append(const(const_prod))
    for base in order:
        e = exps[base]
        if e == 0.0:
            continue
        out.append(base if e == 1.0 else power(base, const(e)))

    if not out:
        return ONE
    if len(out) == 1:
        return out[0]
    return _node("multiply", children=out)


def negate(e) -> Expression:
    e = _coerce(e)
    if e.kind == "constant":
        return const(-e.value)
    return multiply(MINUS_ONE, e)


def subtract(a, b) -> Expression:
    return add(_coerce(a), negate(b))


def divide(a, b) -> Expression:
    a, b = _coerce(a), _coerce(b)
    if b.kind == "constant" and b.value != 0.0:
        return multiply(a, const(1.0 / b.value))
    if a is ZERO:
        return ZERO
    if a is b:
        return ONE
    return _node("divide", children=(a, b))


def power(a, b) -> Expression:
    a, b = _coerce(a), _coerce(b)
    if b.kind == "constant":
        c = b.value
        if c == 0.0:
            return ONE
        if c == 1.0:
            return a
        if a.kind == "constant":
            try:
                v = a.value**c
            except (OverflowError, ValueError):
                v = None
            if v is not None and isinstance(v, float) and math.isfinite(v):
                return const(v)
        if a.kind == "sqrt" and c == 2.0:
            return a.children[0]
        if a.kind == "abs" and c == 2.0:
            return power(a.children[0], const(2.0))
        if a.kind == "power" and a.children[1].kind == "constant" and c.is_integer():
            # (x^m)^n = x^(m n) for integer n; fractional n could extract
            # roots of even powers and change values, so it stays put.
            return power(a.children[0], const(a.children[1].value * c))
    return _node("power", children=(a, b))


def exp(e) -> Expression:
    e = _coerce(e)
    if e is ZERO:
        return ONE
    if e.kind == "constant":
        v = math.exp(e.value) if e.value < 709.0 else None
        if v is not None:
            return const(v)
    return _node("exp", children=(e,))


def ln(e) -> Expression:
    e = _coerce(e)
    if e.kind == "constant" and e.value > 0.0:
        return const(math.log(e.value))
    if e.kind == "exp":
        return e.children[0]
    return _node("ln", children=(e,))


def sqrt(e) -> Expression:
    e = _coerce(e)
    if e.kind == "constant" and e.value >= 0.0:
        return const(math.sqrt(e.value))
    if e.kind == "power" and e.children[1].kind == "constant" and e.children[1].value == 2.0:
        return abs_(e.children[0])
    return _node("sqrt", children=(e,))


_POSITIVE_KINDS = ("exp", "sqrt", "normal_pdf")


def abs_(e) -> Expression:
    e = _coerce(e)
    if e.kind == "constant":
        return const(abs(e.value))
    if e.kind in ("abs",) + _POSITIVE_KINDS or e.kind == "normal_cdf":
        return e
    if e.kind == "multiply" and e.children[0].kind == "constant":
        c = e.children[0].value
        rest = e.children[1:]
        inner = rest[0] if len(rest) == 1 else _node("multiply", children=rest)
        return multiply(const(abs(c)), abs_(inner))
    return _node("abs", children=(e,))


def sign(e) -> Expression:
    e = _coerce(e)
    if e.kind == "constant":
        v = e.value
        return const(0.0 if v == 0.0 else math.copysign(1.0, v))
    if e.kind in _POSITIVE_KINDS:
        return ONE
    if e.kind == "sign":
        return e
    if e.kind == "multiply" and e.children[0].kind == "constant":
        c = e.children[0].value
        rest = e.children[1:]
        inner = rest[0] if len(rest) == 1 else _node("multiply", children=rest)
        return multiply(const(0.0 if c == 0.0 else math.copysign(1.0, c)), sign(inner))
    return _node("sign", children=(e,))


def normal_pdf(e) -> Expression:
    e = _coerce(e)
    if e.kind == "constant":
        return const(_INV_SQRT_2PI * math.exp(-0.5 * e.value * e.value))
    return _node("normal_pdf", children=(e,))


def normal_cdf(e) -> Expression:
    e = _coerce(e)
    if e.kind == "constant":
        return const(0.5 * math.erfc(-e.value * _SQRT1_2))
    return _node("normal_cdf", children=(e,))


# ---------------------------------------------------------------------------
# differentiation

_DIFF_CACHE: dict = {}


def differentiate(e: Expression, v: str) -> Expression:
    """Exact symbolic partial derivative of e with respect to variable v."""
    if not v or not isinstance(v, str):
        raise SymxError(f"variable name must be a non-empty string, got {v!r}")
    key = (e, v)
    hit = _DIFF_CACHE.get(key)
    if hit is not None:
        return hit

    k = e.kind
    if k == "constant":
        d = ZERO
    elif k == "variable":
        d = ONE if e.name == v else ZERO
    elif k == "add":
        d = add(*[differentiate(c, v) for c in e.children])
    elif k == "multiply":
        parts = []
        ch = e.children
        for i, ci in enumerate(ch):
            di = differentiate(ci, v)
            if di is ZERO:
                continue
            parts.append(multiply(*(ch[:i] + (di,) + ch[i + 1 :])))
        d = add(*parts) if parts else ZERO
    elif k == "divide":
        a, b = e.children
        da, db = differentiate(a, v), differentiate(b, v)
        # Written as (da - (a/b) db)/b rather than (da b - a db)/b^2: repeated
        # differentiation then keeps the denominator at first degree instead
        # of squaring it each pass (which underflows numerically).
        d = divide(subtract(da, multiply(e, db)), b)
    elif k == "power":
        a, b = e.children
        da = differentiate(a, v)
        if b.kind == "constant":
            c = b.value
            d = multiply(const(c), power(a, const(c - 1.0)), da)
        else:
            db = differentiate(b, v)
            # general rule via exp(b ln a): a^b (b' ln a + b a'/a)
            d = multiply(e, add(multiply(db, ln(a)), multiply(b, divide(da, a))))
    elif k == "exp":
        d = multiply(e, differentiate(e.children[0], v))
    elif k == "ln":
        u = e.children[0]
        d = divide(differentiate(u, v), u)
    elif k == "sqrt":
        u = e.children[0]
        d = divide(differentiate(u, v), multiply(const(2.0), e))
    elif k == "abs":
        u = e.children[0]
        d = multiply(sign(u), differentiate(u, v))
    elif k == "sign":
        d = ZERO
    elif k == "normal_pdf":
        u = e.children[0]
        d = multiply(negate(u), e, differentiate(u, v))
    elif k == "normal_cdf":
        u = e.children[0]
        d = multiply(normal_pdf(u), differentiate(u, v))
    else:  # pragma: no cover
        raise SymxError(f"unknown node kind {k!r}")

    _DIFF_CACHE[key] = d
    return d


# ---------------------------------------------------------------------------
# simplify / instrumentation

def simplify(e: Expression) -> Expression:
    """Re-run the normalization rules bottom-up.

    Constructor-built trees are already in normal form, so this is idempotent
    by construction; it exists to normalize trees assembled by other means and
    as the documented hook the expansion engine calls after each recursion step.
    """
    memo: dict[Expression, Expression] = {}
    order = _postorder(e)
    for n in order:
        k = n.kind
        if k in ("constant", "variable"):
            memo[n] = n
            continue
        ch = [memo[c] for c in n.children]
        if k == "add":
            memo[n] = add(*ch)
        elif k == "multiply":
            memo[n] = multiply(*ch)
        elif k == "divide":
            memo[n] = divide(ch[0], ch[1])
        elif k == "power":
            memo[n] = power(ch[0], ch[1])
        elif k == "exp":
            memo[n] = exp(ch[0])
        elif k == "ln":
            memo[n] = ln(ch[0])
        elif k == "sqrt":
            memo[n] = sqrt(ch[0])
        elif k == "abs":
            memo[n] = abs_(ch[0])
        elif k == "sign":
            memo[n] = sign(ch[0])
        elif k == "normal_pdf":
            memo[n] = normal_pdf(ch[0])
        elif k == "normal_cdf":
            memo[n] = normal_cdf(ch[0])
        else:  # pragma: no cover
            raise SymxError(f"unknown node kind {k!r}")
    return memo[e]


def _postorder(e: Expression) -> list[Expression]:
    """Children-before-parents order over the unique nodes reachable from e."""
    seen = set()
    order = []
    stack = [(e, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for c in reversed(node.children):
            if id(c) not in seen:
                stack.append((c, False))
    return order


def node_count(e: Expression) -> int:
    """Total tree node count (shared subtrees counted once per occurrence)."""
    counts: dict[Expression, int] = {}
    for n in _postorder(e):
        counts[n] = 1 + sum(counts[c] for c in n.children)
    return counts[e]


def dag_size(e: Expression) -> int:
    """Number of unique nodes (the cost driver for evaluation)."""
    return len(_postorder(e))


def variables(e: Expression) -> set[str]:
    return {n.name for n in _postorder(e) if n.kind == "variable"}


# ---------------------------------------------------------------------------
# evaluation (scalar, checked; vector paths live in _tape/backend)


def evaluate(e: Expression, binding: dict) -> float:
    """Evaluate e at a binding of variable names to finite reals.

    Raises UnboundVariableError for missing variables and DomainError (carrying
    the offending subexpression) for domain violations or non-finite
    intermediates.
    """
    from .backend import evaluate_scalar

    return evaluate_scalar(e, binding)


def evaluate_many(e: Expression, arrays: dict):
    """Vectorized evaluation over aligned numpy arrays of binding values."""
    from .backend import evaluate_vector

    return evaluate_vector(e, arrays)


# ---------------------------------------------------------------------------
# serialization (debug dumps)

_TEXT_NAMES = {
    "add": "add",
    "multiply": "multiply",
    "divide": "divide",
    "power": "power",
    "exp": "exp",
    "ln": "ln",
    "sqrt": "sqrt",
    "abs": "abs",
    "sign": "sign",
    "normal_pdf": "normal_pdf",
    "normal_cdf": "normal_cdf",
}


def to_text(e: Expression, max_len: int | None = None) -> str:
    """Prefix s-expression rendering, e.g. (add S (multiply -1 K))."""
    memo: dict[Expression, str] = {}
    for n in _postorder(e):
        if n.kind == "constant":
            v = n.value
            memo[n] = repr(int(v)) if v == int(v) and abs(v) < 1e15 else repr(v)
        elif n.kind == "variable":
            memo[n] = n.name
        else:
            inner = " ".join(memo[c] for c in n.children)
            memo[n] = f"({_TEXT_NAMES[n.kind]} {inner})"
    s = memo[e]
    if max_len is not None and len(s) > max_len:
        s = s[: max_len - 3] + "..."
    return s
