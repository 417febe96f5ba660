"""Evaluation backend selection and the public evaluate entry points.

The compiled extension (``kmseries._evalcore``) is optional.  At import time
we pick it when present, else fall back to the numpy interpreter; the
KMSERIES_BACKEND environment variable ("python" or "compiled") forces the
choice.  Scalar evaluation always goes through the checked python interpreter
so error reporting is identical on every install.
"""

from __future__ import annotations

import os

import numpy as np

from . import _tape
from .symx import DomainError, Expression, UnboundVariableError

try:
    from . import _evalcore as _core
except ImportError:
    _core = None

_requested = os.environ.get("KMSERIES_BACKEND", "").strip().lower()
if _requested in ("", "auto"):
    _ACTIVE = "compiled" if _core is not None else "python"
elif _requested in ("python", "numpy"):
    _ACTIVE = "python"
elif _requested in ("compiled", "cython", "c"):
    if _core is None:
        raise ImportError(
            "KMSERIES_BACKEND asked for the compiled backend but "
            "kmseries._evalcore is not built; reinstall with a C toolchain "
            "and Cython available, or unset KMSERIES_BACKEND"
        )
    _ACTIVE = "compiled"
else:
    raise ImportError(f"unrecognized KMSERIES_BACKEND value {_requested!r}")


def backend_name() -> str:
    """Name of the vector backend in use: 'compiled' or 'python'."""
    return _ACTIVE


def available_backends() -> tuple[str, ...]:
    return ("python", "compiled") if _core is not None else ("python",)


_TAPE_CACHE: dict[Expression, _tape.Tape] = {}


def tape_for(e: Expression) -> _tape.Tape:
    t = _TAPE_CACHE.get(e)
    if t is None:
        t = _tape.compile_tape(e)
        _TAPE_CACHE[e] = t
    return t


def evaluate_scalar(e: Expression, binding: dict) -> float:
    return _tape.run_scalar_checked(tape_for(e), binding)


def evaluate_vector(e: Expression, arrays: dict, backend: str | None = None):
    """Evaluate over broadcast arrays; scalar inputs give a float back.

    Non-finite results trigger a checked scalar re-run at the first offending
    point so the caller sees the same DomainError the scalar path raises.
    """
    tape = tape_for(e)
    values = []
    for name in tape.var_names:
        if name not in arrays:
            raise UnboundVariableError(name)
        values.append(np.asarray(arrays[name], dtype=np.float64))
    shape = np.broadcast_shapes(*(v.shape for v in values)) if values else ()
    n_points = int(np.prod(shape, dtype=np.int64)) if shape else 1
    if values:
        var_matrix = np.ascontiguousarray(
            np.stack([np.broadcast_to(v, shape).ravel() for v in values])
        )
    else:
        var_matrix = np.empty((0, n_points), dtype=np.float64)

    which = backend or _ACTIVE
    if which not in ("python", "compiled"):
        raise ValueError(f"unknown backend {which!r}; expected 'python' or 'compiled'")
    if which == "compiled":
        if _core is None:
            raise ValueError("compiled backend requested but not built")
        out = _tape.run_vector_compiled(tape, var_matrix, _core)
    else:
        out = _tape.run_vector_numpy(tape, var_matrix)

    bad = ~np.isfinite(out)
    if bad.any():
        idx = int(np.argmax(bad))
        point = {name: float(var_matrix[j, idx]) for j, name in enumerate(tape.var_names)}
        _tape.run_scalar_checked(tape, point)  # expected to raise with context
        raise DomainError("non-finite result from vector evaluation")

    if shape == ():
        return float(out[0])
    return out.reshape(shape)
