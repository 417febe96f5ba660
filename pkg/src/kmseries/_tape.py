"""Compile expression DAGs into a linear register program.

A tape is a flat instruction list over a float64 register file: constants and
variables get pinned registers, interior nodes become binary ops (n-ary sums
and products are chained), and temporary registers are recycled once their
last reader has run.  The same tape drives three executors: a checked scalar
interpreter (raises precise errors), a numpy vector interpreter, and the
optional compiled kernel in ``_evalcore``.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import ndtr

from .symx import DomainError, Expression, UnboundVariableError, _postorder

ADD, MUL, DIV, POW, EXP, LN, SQRT, ABS, SIGN, NPDF, NCDF = range(11)

_UNARY_OPS = {
    "exp": EXP,
    "ln": LN,
    "sqrt": SQRT,
    "abs": ABS,
    "sign": SIGN,
    "normal_pdf": NPDF,
    "normal_cdf": NCDF,
}

_INV_SQRT_2PI = 0.3989422804014327
_SQRT1_2 = math.sqrt(0.5)


class Tape:
    __slots__ = (
        "expression",
        "ops",
        "dst",
        "arg_a",
        "arg_b",
        "sources",
        "n_registers",
        "init_regs",
        "var_names",
        "var_regs",
        "result_reg",
        "_init_list",
    )

    def __init__(self, expression, ops, dst, arg_a, arg_b, sources, n_registers,
                 init_regs, var_names, var_regs, result_reg):
        self.expression = expression
        self.ops = ops
        self.dst = dst
        self.arg_a = arg_a
        self.arg_b = arg_b
        self.sources = sources
        self.n_registers = n_registers
        self.init_regs = init_regs
        self.var_names = var_names
        self.var_regs = var_regs
        self.result_reg = result_reg
        self._init_list = None

    def __len__(self):
        return len(self.ops)


def compile_tape(e: Expression) -> Tape:
    order = _postorder(e)

    # Pin registers for leaves first; they are loaded before the program runs.
    reg_of: dict[Expression, int] = {}
    const_vals: list[float] = []
    const_regs: list[int] = []
    var_names: list[str] = []
    var_regs: list[int] = []
    next_reg = 0
    for n in order:
        if n.kind == "constant":
            reg_of[n] = next_reg
            const_regs.append(next_reg)
            const_vals.append(n.value)
            next_reg += 1
        elif n.kind == "variable":
            reg_of[n] = next_reg
            var_regs.append(next_reg)
            var_names.append(n.name)
            next_reg += 1
    n_pinned = next_reg

    # Emit instructions against virtual value ids, then allocate registers
    # with a free list keyed off each temp's last use.
    instrs: list[tuple[int, int, int, int, Expression]] = []  # op, out, a, b, src
    vid_of: dict[Expression, int] = {}
    next_vid = 0

    def leaf_vid(node):
        nonlocal next_vid
        if node in vid_of:
            return vid_of[node]
        v = next_vid
        next_vid += 1
        vid_of[node] = v
        return v

    pinned_vids: dict[int, int] = {}  # vid -> register
    for n in order:
        if n.kind in ("constant", "variable"):
            pinned_vids[leaf_vid(n)] = reg_of[n]

    for n in order:
        k = n.kind
        if k in ("constant", "variable"):
            continue
        if k in ("add", "multiply"):
            op = ADD if k == "add" else MUL
            acc = vid_of[n.children[0]]
            for child in n.children[1:]:
                out = next_vid
                next_vid += 1
                instrs.append((op, out, acc, vid_of[child], n))
                acc = out
            vid_of[n] = acc
        elif k in ("divide", "power"):
            op = DIV if k == "divide" else POW
            out = next_vid
            next_vid += 1
            instrs.append((op, out, vid_of[n.children[0]], vid_of[n.children[1]], n))
            vid_of[n] = out
        else:
            out = next_vid
            next_vid += 1
            instrs.append((_UNARY_OPS[k], out, vid_of[n.children[0]], -1, n))
            vid_of[n] = out

    result_vid = vid_of[e]

    last_use = {result_vid: len(instrs)}
    for i, (_, _, a, b, _) in enumerate(instrs):
        last_use[a] = max(last_use.get(a, -1), i)
        if b >= 0:
            last_use[b] = max(last_use.get(b, -1), i)

    reg_of_vid = dict(pinned_vids)
    free: list[int] = []
    ops_l, dst_l, a_l, b_l, src_l = [], [], [], [], []
    for i, (op, out, a, b, src) in enumerate(instrs):
        ra = reg_of_vid[a]
        rb = reg_of_vid[b] if b >= 0 else -1
        # Operands read before the destination write, so a dying operand's
        # register can host the result.
        for operand in (a, b):
            if operand >= 0 and operand not in pinned_vids and last_use.get(operand, -1) == i:
                free.append(reg_of_vid[operand])
        if free:
            rd = free.pop()
        else:
            rd = next_reg
            next_reg += 1
        reg_of_vid[out] = rd
        ops_l.append(op)
        dst_l.append(rd)
        a_l.append(ra)
        b_l.append(rb)
        src_l.append(src)

    init_regs = np.zeros(next_reg, dtype=np.float64)
    for r, v in zip(const_regs, const_vals):
        init_regs[r] = v

    return Tape(
        expression=e,
        ops=np.asarray(ops_l, dtype=np.int32),
        dst=np.asarray(dst_l, dtype=np.int32),
        arg_a=np.asarray(a_l, dtype=np.int32),
        arg_b=np.asarray(b_l, dtype=np.int32),
        sources=src_l,
        n_registers=next_reg,
        init_regs=init_regs,
        var_names=var_names,
        var_regs=np.asarray(var_regs, dtype=np.int32),
        result_reg=reg_of_vid[result_vid],
    )


def run_scalar_checked(tape: Tape, binding: dict) -> float:
    """Interpret the tape at one point with full domain checking."""
    if tape._init_list is None:
        tape._init_list = tape.init_regs.tolist()
    regs = list(tape._init_list)
    for name, reg in zip(tape.var_names, tape.var_regs):
        if name not in binding:
            raise UnboundVariableError(name)
        val = float(binding[name])
        if not math.isfinite(val):
            raise DomainError(f"non-finite value {val} bound to variable {name!r}")
        regs[reg] = val

    ops, dst, arg_a, arg_b, src = tape.ops, tape.dst, tape.arg_a, tape.arg_b, tape.sources
    for i in range(len(ops)):
        op = ops[i]
        x = regs[arg_a[i]]
        if op == ADD:
            v = x + regs[arg_b[i]]
        elif op == MUL:
            v = x * regs[arg_b[i]]
        elif op == DIV:
            y = regs[arg_b[i]]
            if y == 0.0:
                raise DomainError("division by zero", src[i])
            v = x / y
        elif op == POW:
            try:
                v = math.pow(x, regs[arg_b[i]])
            except (ValueError, OverflowError):
                raise DomainError(f"invalid power with base {x!r}", src[i]) from None
        elif op == EXP:
            try:
                v = math.exp(x)
            except OverflowError:
                raise DomainError("exponential overflow", src[i]) from None
        elif op == LN:
            if x <= 0.0:
                raise DomainError(f"logarithm of non-positive value {x!r}", src[i])
            v = math.log(x)
        elif op == SQRT:
            if x < 0.0:
                raise DomainError(f"square root of negative value {x!r}", src[i])
            v = math.sqrt(x)
        elif op == ABS:
            v = abs(x)
        elif op == SIGN:
            v = 0.0 if x == 0.0 else (1.0 if x > 0.0 else -1.0)
        elif op == NPDF:
            v = _INV_SQRT_2PI * math.exp(-0.5 * x * x)
        else:  # NCDF
            v = 0.5 * math.erfc(-x * _SQRT1_2)
        if not math.isfinite(v):
            raise DomainError("non-finite intermediate value", src[i])
        regs[dst[i]] = v
    return regs[tape.result_reg]


def run_vector_numpy(tape: Tape, var_matrix: np.ndarray) -> np.ndarray:
    """Unchecked numpy interpretation; invalid points come back non-finite."""
    n_points = var_matrix.shape[1]
    regs: list = [None] * tape.n_registers
    init = tape.init_regs
    for r in range(tape.n_registers):
        regs[r] = init[r]
    for j, reg in enumerate(tape.var_regs):
        regs[reg] = var_matrix[j]

    ops, dst, arg_a, arg_b = tape.ops, tape.dst, tape.arg_a, tape.arg_b
    with np.errstate(all="ignore"):
        for i in range(len(ops)):
            op = ops[i]
            x = regs[arg_a[i]]
            if op == ADD:
                v = x + regs[arg_b[i]]
            elif op == MUL:
                v = x * regs[arg_b[i]]
            elif op == DIV:
                v = x / regs[arg_b[i]]
            elif op == POW:
                v = np.power(x, regs[arg_b[i]])
            elif op == EXP:
                v = np.exp(x)
            elif op == LN:
                v = np.log(x)
            elif op == SQRT:
                v = np.sqrt(x)
            elif op == ABS:
                v = np.abs(x)
            elif op == SIGN:
                v = np.sign(x)
            elif op == NPDF:
                v = _INV_SQRT_2PI * np.exp(-0.5 * np.square(x))
            else:  # NCDF
                v = ndtr(x)
            regs[dst[i]] = v
    out = regs[tape.result_reg]
    if np.ndim(out) == 0:
        return np.full(n_points, float(out))
    return np.asarray(out, dtype=np.float64)


def run_vector_compiled(tape: Tape, var_matrix: np.ndarray, core) -> np.ndarray:
    return core.run_tape(
        tape.ops, tape.dst, tape.arg_a, tape.arg_b,
        tape.init_regs, tape.var_regs,
        np.ascontiguousarray(var_matrix, dtype=np.float64),
        tape.result_reg,
    )
